//! One-dimensional golden-section maximization, used to refine grid
//! maxima of the smooth trigonometric best-response objectives.

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

/// Maximizes `f` on [a, b] by golden-section search down to interval
/// width `xtol`. Returns (argmax, max). Assumes `f` is unimodal on the
/// bracket; on a flat stretch any point of the plateau may be returned.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    if b < a {
        std::mem::swap(&mut a, &mut b);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > xtol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Near a smooth peak the function is flat to machine epsilon over a
    // ~sqrt(eps) span, so the argmax is only locatable to ~1e-7 even
    // though the value converges to full precision.
    #[test]
    fn finds_sine_peak() {
        let (x, v) = golden_section_max(|x| x.sin(), 0.0, PI, 1e-10);
        assert!((x - PI / 2.0).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn finds_quadratic_peak_off_center() {
        let (x, v) = golden_section_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-7);
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn endpoint_maximum() {
        let (x, _) = golden_section_max(|x| x, 0.0, 2.0, 1e-10);
        assert!((x - 2.0).abs() < 1e-8);
    }

    #[test]
    fn reversed_bracket_is_normalized() {
        let (x, _) = golden_section_max(|x| -(x - 1.0).powi(2), 2.0, 0.0, 1e-10);
        assert!((x - 1.0).abs() < 1e-8);
    }
}
