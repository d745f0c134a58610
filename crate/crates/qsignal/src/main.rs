//! `qsignal` — classical and quantum equilibrium analysis of a two-type
//! signaling game, driven by a `.game` spec file.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qsignal::classical::{self, COL_LABELS, ROW_LABELS};
use qsignal::qpbe::{self, MaxScope, QPbeReport, RationalityVerdict, SearchSettings};
use qsignal::qsignaling::{self, QProfile, COL_LABELS_Q, ROW_LABELS_Q};
use qsignal::report::{
    fmt_num, to_rounded_json, AnalysisReport, BimatrixReport, ClassicalPbeReport, ClassifyReport,
    NashEntry, NashReport, StateReport,
};
use qsignal::specfile::{parse_angle, parse_game_spec, GameSpecFile};
use qsignal::Error;

#[derive(Parser)]
#[command(name = "qsignal", version, about = "Equilibrium analysis of a quantized signaling game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the 4x4 normal-form bimatrix
    NormalForm(ModelArgs),
    /// Print the pure Nash equilibrium set of the normal form
    Nash(ModelArgs),
    /// Equilibrium refinement: classical weak PBE, or the quantum
    /// counterpart with beliefs and best-response verdicts
    Pbe(ModelArgs),
    /// Nonzero Psi-basis amplitudes of the final state for a profile
    State(StateArgs),
    /// The 16-profile Nash x rationality cross-table (quantum)
    Classify(SearchArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the .game spec file
    spec: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct ModelArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Analyze the classical game
    #[arg(long)]
    classical: bool,
    /// Analyze the quantum scheme
    #[arg(long)]
    quantum: bool,
    #[command(flatten)]
    search: SearchFlags,
}

#[derive(Args)]
struct StateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Player operator thetas as theta2,theta3,theta4,theta5 (pi tokens allowed)
    #[arg(long)]
    profile: String,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    search: SearchFlags,
}

#[derive(Args)]
struct SearchFlags {
    /// Grid points per search parameter (overrides the spec file)
    #[arg(long)]
    grid: Option<usize>,
    /// Optimality tolerance for best-response gaps (overrides the spec file)
    #[arg(long)]
    tol: Option<f64>,
    /// Best-response maximization scope
    #[arg(long, value_enum, default_value_t = ScopeArg::Pair)]
    scope: ScopeArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScopeArg {
    Pair,
    PerQubit,
}

impl From<ScopeArg> for MaxScope {
    fn from(s: ScopeArg) -> MaxScope {
        match s {
            ScopeArg::Pair => MaxScope::Pair,
            ScopeArg::PerQubit => MaxScope::PerQubit,
        }
    }
}

/// Exit 2: spec/usage errors. Exit 3: internal numeric-invariant
/// violations.
struct CliError {
    code: u8,
    msg: String,
}

fn spec_err(msg: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        msg: msg.into(),
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let code = match e {
            Error::NumericInvariant(_) => 3,
            _ => 2,
        };
        CliError {
            code,
            msg: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

fn load_spec(common: &CommonArgs) -> Result<GameSpecFile, CliError> {
    let text = std::fs::read_to_string(&common.spec)
        .map_err(|e| spec_err(format!("{}: {e}", common.spec.display())))?;
    parse_game_spec(&text).map_err(|e| spec_err(e.to_string()))
}

fn pick_mode(classical: bool, quantum: bool) -> Result<bool, CliError> {
    match (classical, quantum) {
        (true, false) => Ok(false),
        (false, true) => Ok(true),
        _ => Err(spec_err("pass exactly one of --classical or --quantum")),
    }
}

fn settings(spec: &GameSpecFile, flags: &SearchFlags) -> SearchSettings {
    let defaults = SearchSettings::default();
    SearchSettings {
        grid: flags.grid.or(spec.grid).unwrap_or(defaults.grid),
        opt_tol: flags.tol.or(spec.tol).unwrap_or(defaults.opt_tol),
    }
}

fn parse_profile(text: &str) -> Result<QProfile, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(spec_err("--profile takes four comma-separated angles"));
    }
    let mut thetas = [0.0f64; 4];
    for (slot, part) in thetas.iter_mut().zip(&parts) {
        *slot = parse_angle(part)
            .ok_or_else(|| spec_err(format!("invalid angle `{}`", part.trim())))?;
    }
    QProfile::from_thetas(thetas[0], thetas[1], thetas[2], thetas[3]).map_err(CliError::from)
}

fn emit(common: &CommonArgs, report: &AnalysisReport, table: String) -> Result<(), CliError> {
    let text = match common.format {
        Format::Table => table,
        Format::Json => {
            let value = to_rounded_json(report)?;
            serde_json::to_string_pretty(&value).map_err(|e| spec_err(e.to_string()))?
        }
    };
    use std::io::Write;
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    match writeln!(std::io::stdout(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(spec_err(e.to_string())),
        Ok(()) => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::NormalForm(args) => {
            let spec = load_spec(&args.common)?;
            let quantum = pick_mode(args.classical, args.quantum)?;
            let form = if quantum {
                qsignaling::q_normal_form(&spec.quantum_config()?)?
            } else {
                classical::normal_form(&spec.classical_spec()?)
            };
            let mode = if quantum { "quantum" } else { "classical" };
            let report = BimatrixReport::new(mode, quantum, &form.entries);
            let table = render_bimatrix(&report, spec.p_chance());
            emit(&args.common, &AnalysisReport::NormalForm(report), table)
        }
        Command::Nash(args) => {
            let spec = load_spec(&args.common)?;
            let quantum = pick_mode(args.classical, args.quantum)?;
            let (mode, equilibria) = if quantum {
                let config = spec.quantum_config()?;
                let form = qsignaling::q_normal_form(&config)?;
                let entries = qsignaling::q_pure_nash(&config)?
                    .into_iter()
                    .map(|((r, c), _)| NashEntry {
                        cell: (r, c),
                        label: format!("({}, {})", ROW_LABELS_Q[r], COL_LABELS_Q[c]),
                        payoffs: form.entries[r][c],
                    })
                    .collect();
                ("quantum", entries)
            } else {
                let form = classical::normal_form(&spec.classical_spec()?);
                let entries = form
                    .pure_nash()
                    .into_iter()
                    .map(|(r, c)| NashEntry {
                        cell: (r, c),
                        label: format!("({},{})", ROW_LABELS[r], COL_LABELS[c]),
                        payoffs: form.entries[r][c],
                    })
                    .collect();
                ("classical", entries)
            };
            let report = NashReport {
                mode: mode.into(),
                equilibria,
            };
            let table = render_nash(&report);
            emit(&args.common, &AnalysisReport::Nash(report), table)
        }
        Command::Pbe(args) => {
            let spec = load_spec(&args.common)?;
            let quantum = pick_mode(args.classical, args.quantum)?;
            if quantum {
                let config = spec.quantum_config()?;
                let report = qpbe::q_pbe(
                    &config,
                    &settings(&spec, &args.search),
                    args.search.scope.into(),
                )?;
                let table = render_quantum_pbe(&report);
                emit(&args.common, &AnalysisReport::QuantumPbe(report), table)
            } else {
                let analyses = classical::weak_pbe(&spec.classical_spec()?);
                let report = ClassicalPbeReport::new(analyses);
                let table = render_classical_pbe(&report);
                emit(&args.common, &AnalysisReport::ClassicalPbe(report), table)
            }
        }
        Command::State(args) => {
            let spec = load_spec(&args.common)?;
            let config = spec.quantum_config()?;
            let profile = parse_profile(&args.profile)?;
            let state = qsignaling::final_state(&config, &profile)?;
            let payoffs = qsignaling::q_payoffs(&config, &profile)?;
            let report = StateReport::new(profile.thetas(), &state, payoffs);
            let table = render_state(&report);
            emit(&args.common, &AnalysisReport::State(report), table)
        }
        Command::Classify(args) => {
            let spec = load_spec(&args.common)?;
            let config = spec.quantum_config()?;
            let full = qpbe::q_pbe(
                &config,
                &settings(&spec, &args.search),
                args.search.scope.into(),
            )?;
            let report = ClassifyReport::new(&full);
            let table = render_classify(&report);
            emit(&args.common, &AnalysisReport::Classify(report), table)
        }
    }
}

fn pair(p: (f64, f64)) -> String {
    format!("({}, {})", fmt_num(p.0), fmt_num(p.1))
}

fn render_bimatrix(report: &BimatrixReport, p_chance: f64) -> String {
    let mut cells: Vec<Vec<String>> = Vec::new();
    for (r, row) in report.cells.iter().enumerate() {
        let mut line = vec![report.row_labels[r].clone()];
        line.extend(row.iter().map(|&c| pair(c)));
        cells.push(line);
    }
    let mut header = vec![String::new()];
    header.extend(report.col_labels.iter().cloned());
    let mut out = format!(
        "{} normal form (p = {})\n",
        report.mode,
        fmt_num(p_chance)
    );
    out.push_str(&render_columns(&header, &cells));
    out
}

// Left-justified column layout for a header row plus body rows.
fn render_columns(header: &[String], rows: &[Vec<String>]) -> String {
    let ncols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let emit_row = |out: &mut String, row: &[String]| {
        for (i, cell) in row.iter().enumerate() {
            out.push_str(&format!("{:<width$}", cell, width = widths[i]));
            if i + 1 < ncols {
                out.push_str("  ");
            }
        }
        while out.ends_with(' ') {
            out.pop();
        }
        out.push('\n');
    };
    emit_row(&mut out, header);
    for row in rows {
        emit_row(&mut out, row);
    }
    out
}

fn render_nash(report: &NashReport) -> String {
    let mut out = format!("{} pure Nash equilibria: {}\n", report.mode, report.equilibria.len());
    for e in &report.equilibria {
        out.push_str(&format!("  {}  payoffs {}\n", e.label, pair(e.payoffs)));
    }
    out
}

fn render_classical_pbe(report: &ClassicalPbeReport) -> String {
    let mut out = String::from("classical weak PBE analysis (16 pure profiles)\n");
    for a in &report.analyses {
        let beliefs = format!(
            "b1 {}, b2 {}",
            a.forced_b1.map(fmt_num).unwrap_or_else(|| "free".into()),
            a.forced_b2.map(fmt_num).unwrap_or_else(|| "free".into()),
        );
        if let Some(w) = &a.witness {
            out.push_str(&format!(
                "  {}  PBE      consistent: {beliefs}; witness (b1, b2) = ({}, {})\n",
                a.profile.label(),
                fmt_num(w.b1),
                fmt_num(w.b2),
            ));
        } else {
            // Name one failing set of the first trial as the reason.
            let reason = a
                .trials
                .iter()
                .flat_map(|t| t.verdicts.iter())
                .find(|v| !v.pass)
                .map(|v| format!("{:?} suboptimal (gap {})", v.set, fmt_num(v.gap)))
                .unwrap_or_else(|| "no passing beliefs".into());
            out.push_str(&format!(
                "  {}  not PBE  consistent: {beliefs}; {reason}\n",
                a.profile.label()
            ));
        }
    }
    out.push_str(&format!("accepted: {}\n", report.accepted.join(", ")));
    out
}

fn render_verdict(v: &RationalityVerdict) -> String {
    if v.off_path {
        return format!("    {:?}: off-path (vacuous pass)\n", v.set);
    }
    let beliefs: Vec<String> = v.weights.iter().map(|&w| fmt_num(w)).collect();
    let argmax: Vec<String> = v.argmax.iter().map(|a| a.format()).collect();
    format!(
        "    {:?}: beliefs ({}); achieved {} vs max {} (gap {}) -> {}\n      argmax: {}\n",
        v.set,
        beliefs.join(", "),
        fmt_num(v.achieved),
        fmt_num(v.max_value),
        fmt_num(v.gap),
        if v.pass { "pass" } else { "FAIL" },
        argmax.join("; "),
    )
}

fn render_quantum_pbe(report: &QPbeReport) -> String {
    let mut out = String::from("quantum PBE analysis (16 theta-only profiles)\n");
    for row in &report.rows {
        out.push_str(&format!(
            "  cell ({}, {})  {} x {}  payoffs {}  nash: {}  rational: {}  -> {:?}\n",
            row.cell.0,
            row.cell.1,
            ROW_LABELS_Q[row.cell.0],
            COL_LABELS_Q[row.cell.1],
            pair(row.payoffs),
            if row.nash { "yes" } else { "no" },
            if row.rational { "yes" } else { "no" },
            row.class,
        ));
        for v in &row.verdicts {
            out.push_str(&render_verdict(v));
        }
    }
    out.push_str(&format!(
        "quantum PBE cells: {:?}\nrational but not Nash: {:?}\n",
        report.pbe_cells, report.rational_not_nash
    ));
    out
}

fn render_state(report: &StateReport) -> String {
    let thetas: Vec<String> = report.thetas.iter().map(|&t| fmt_num(t)).collect();
    let mut out = format!("final state for thetas ({})\n", thetas.join(", "));
    for t in &report.terms {
        out.push_str(&format!(
            "  Psi_{}: {} {} {}i  |amp|^2 = {}\n",
            t.label,
            fmt_num(t.re),
            if t.im < 0.0 { "-" } else { "+" },
            fmt_num(t.im.abs()),
            fmt_num(t.prob),
        ));
    }
    out.push_str(&format!("payoffs {}\n", pair(report.payoffs)));
    out
}

fn render_classify(report: &ClassifyReport) -> String {
    let header = vec![
        "cell".to_string(),
        "player 1".to_string(),
        "player 2".to_string(),
        "payoffs".to_string(),
        "nash".to_string(),
        "rational".to_string(),
        "class".to_string(),
    ];
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                format!("({}, {})", r.cell.0, r.cell.1),
                r.row_label.clone(),
                r.col_label.clone(),
                pair(r.payoffs),
                (if r.nash { "yes" } else { "no" }).into(),
                (if r.rational { "yes" } else { "no" }).into(),
                format!("{:?}", r.class),
            ]
        })
        .collect();
    let mut out = String::from("quantum NE x sequential-type-rationality classification\n");
    out.push_str(&render_columns(&header, &rows));
    out.push_str(&format!(
        "quantum PBE cells: {:?}\nrational but not Nash: {:?}\n",
        report.pbe_cells, report.rational_not_nash
    ));
    out
}
