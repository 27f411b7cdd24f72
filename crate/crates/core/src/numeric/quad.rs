//! Adaptive Gauss–Kronrod (7/15) quadrature on straight complex segments.

use num_complex::Complex64;
use serde::Serialize;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { rel_tol: 1e-10, abs_tol: 1e-300, max_depth: 40 }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct QuadResult {
    pub value: Complex64,
    /// Sum of |K15 − G7| over accepted panels plus a roundoff floor.
    pub error: f64,
    /// ∫|f| |dz|, used for the roundoff floor.
    pub abs_integral: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl std::ops::Add for QuadResult {
    type Output = QuadResult;
    fn add(self, o: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + o.value,
            error: self.error + o.error,
            abs_integral: self.abs_integral + o.abs_integral,
            evaluations: self.evaluations + o.evaluations,
            converged: self.converged && o.converged,
        }
    }
}

struct Panel {
    kronrod: Complex64,
    error: f64,
    abs: f64,
}

fn gk15<F: Fn(Complex64) -> Complex64>(f: &F, a: Complex64, b: Complex64) -> Panel {
    let c = (a + b) * 0.5;
    let h = (b - a) * 0.5;
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let f1 = f(c - h * XGK[j]);
        let f2 = f(c + h * XGK[j]);
        k += (f1 + f2) * WGK[j];
        abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            g += (f1 + f2) * WG[j / 2];
        }
    }
    let len = h.norm();
    Panel { kronrod: k * h, error: ((k - g) * h).norm(), abs: abs * len }
}

/// ∫_a^b f(z) dz along the straight segment.
pub fn integrate_segment<F: Fn(Complex64) -> Complex64>(f: &F, a: Complex64, b: Complex64, cfg: &QuadConfig) -> QuadResult {
    let whole = gk15(f, a, b);
    let mut out = QuadResult { evaluations: 15, converged: true, ..Default::default() };
    let target = |scale: f64| cfg.abs_tol.max(cfg.rel_tol * scale);
    let global_scale = whole.kronrod.norm().max(1e-3 * whole.abs);
    let total = (b - a).norm();
    let mut stack = vec![(a, b, whole, 0u32)];
    while let Some((lo, hi, panel, depth)) = stack.pop() {
        let share = (hi - lo).norm() / total;
        if panel.error <= target(global_scale) * share || depth >= cfg.max_depth {
            if panel.error > target(global_scale) * share {
                out.converged = false;
            }
            out.value += panel.kronrod;
            out.abs_integral += panel.abs;
            out.error += panel.error;
            continue;
        }
        let mid = (lo + hi) * 0.5;
        let left = gk15(f, lo, mid);
        let right = gk15(f, mid, hi);
        out.evaluations += 30;
        // a refinement that agrees with its parent to roundoff is accepted
        let merged = left.kronrod + right.kronrod;
        if (merged - panel.kronrod).norm() <= 50.0 * f64::EPSILON * (left.abs + right.abs) && depth > 2 {
            out.value += merged;
            out.abs_integral += left.abs + right.abs;
            out.error += left.error.min(panel.error) + right.error.min(panel.error);
            continue;
        }
        stack.push((mid, hi, right, depth + 1));
        stack.push((lo, mid, left, depth + 1));
    }
    out.error += 50.0 * f64::EPSILON * out.abs_integral;
    out
}
