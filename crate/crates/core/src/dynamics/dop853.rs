//! Adaptive DOP853 stepper with lazily built dense output.

use super::tableau::*;

pub type Rhs<'a, const N: usize> = dyn Fn(f64, &[f64; N]) -> [f64; N] + 'a;

#[derive(Clone, Copy, Debug)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepError {
    StepSizeUnderflow,
    MaxSteps,
    NonFinite,
}

fn lin<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        out[i] += h * s;
    }
    out
}

fn sum<const N: usize>(terms: &[(f64, &[f64; N])]) -> [f64; N] {
    lin(&[0.0; N], 1.0, terms)
}

/// Stages k₁…k₁₂ of one step (k₁ supplied) and the 8th-order increment.
struct Trial<const N: usize> {
    k: [[f64; N]; 17],
    y_new: [f64; N],
}

fn trial<const N: usize>(f: &Rhs<N>, t: f64, y: &[f64; N], k1: &[f64; N], h: f64) -> Trial<N> {
    let mut k = [[0.0; N]; 17];
    k[1] = *k1;
    k[2] = f(t + C2 * h, &lin(y, h, &[(A21, &k[1])]));
    k[3] = f(t + C3 * h, &lin(y, h, &[(A31, &k[1]), (A32, &k[2])]));
    k[4] = f(t + C4 * h, &lin(y, h, &[(A41, &k[1]), (A43, &k[3])]));
    k[5] = f(t + C5 * h, &lin(y, h, &[(A51, &k[1]), (A53, &k[3]), (A54, &k[4])]));
    k[6] = f(t + C6 * h, &lin(y, h, &[(A61, &k[1]), (A64, &k[4]), (A65, &k[5])]));
    k[7] = f(t + C7 * h, &lin(y, h, &[(A71, &k[1]), (A74, &k[4]), (A75, &k[5]), (A76, &k[6])]));
    k[8] = f(t + C8 * h, &lin(y, h, &[(A81, &k[1]), (A84, &k[4]), (A85, &k[5]), (A86, &k[6]), (A87, &k[7])]));
    k[9] = f(
        t + C9 * h,
        &lin(y, h, &[(A91, &k[1]), (A94, &k[4]), (A95, &k[5]), (A96, &k[6]), (A97, &k[7]), (A98, &k[8])]),
    );
    k[10] = f(
        t + C10 * h,
        &lin(y, h, &[(A101, &k[1]), (A104, &k[4]), (A105, &k[5]), (A106, &k[6]), (A107, &k[7]), (A108, &k[8]), (A109, &k[9])]),
    );
    k[11] = f(
        t + C11 * h,
        &lin(
            y,
            h,
            &[(A111, &k[1]), (A114, &k[4]), (A115, &k[5]), (A116, &k[6]), (A117, &k[7]), (A118, &k[8]), (A119, &k[9]), (A1110, &k[10])],
        ),
    );
    let y12 = lin(
        y,
        h,
        &[
            (A121, &k[1]),
            (A124, &k[4]),
            (A125, &k[5]),
            (A126, &k[6]),
            (A127, &k[7]),
            (A128, &k[8]),
            (A129, &k[9]),
            (A1210, &k[10]),
            (A1211, &k[11]),
        ],
    );
    k[12] = f(t + h, &y12);
    let y_new = lin(
        y,
        h,
        &[(B1, &k[1]), (B6, &k[6]), (B7, &k[7]), (B8, &k[8]), (B9, &k[9]), (B10, &k[10]), (B11, &k[11]), (B12, &k[12])],
    );
    Trial { k, y_new }
}

/// One unchecked step of size h; used to re-integrate onto event times.
pub fn single_step<const N: usize>(f: &Rhs<N>, t: f64, y: &[f64; N], h: f64) -> [f64; N] {
    let k1 = f(t, y);
    trial(f, t, y, &k1, h).y_new
}

/// Coefficients of the dense polynomial over one accepted step.
#[derive(Clone, Debug)]
pub struct DenseStep<const N: usize> {
    pub t_old: f64,
    pub h: f64,
    cont: [[f64; N]; 8],
}

impl<const N: usize> DenseStep<N> {
    pub fn t_new(&self) -> f64 {
        self.t_old + self.h
    }

    pub fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t_old) / self.h;
        let s1 = 1.0 - s;
        let c = &self.cont;
        let mut out = [0.0; N];
        for i in 0..N {
            let conpar = c[4][i] + (c[5][i] + (c[6][i] + c[7][i] * s) * s1) * s;
            out[i] = c[0][i] + (c[1][i] + (c[2][i] + (c[3][i] + conpar * s1) * s) * s1) * s;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct StepStats {
    pub evaluations: usize,
    pub accepted: usize,
    pub rejected: usize,
}

pub struct Dop853<const N: usize> {
    ctl: StepControl,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    dir: f64,
    facold: f64,
    // last accepted step
    t_old: f64,
    y_old: [f64; N],
    h_old: f64,
    k: [[f64; N]; 17],
    pub stats: StepStats,
}

const SAFE: f64 = 0.9;
const FAC1: f64 = 0.333;
const FAC2: f64 = 6.0;

impl<const N: usize> Dop853<N> {
    /// Start at (t0, y0) heading towards `t_dir` (only its sign relative to t0 matters).
    pub fn new(f: &Rhs<N>, t0: f64, y0: [f64; N], t_dir: f64, ctl: StepControl) -> Self {
        let dir = if t_dir >= t0 { 1.0 } else { -1.0 };
        let k1 = f(t0, &y0);
        let mut this = Dop853 {
            ctl,
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            dir,
            facold: 1e-4,
            t_old: t0,
            y_old: y0,
            h_old: 0.0,
            k: [[0.0; N]; 17],
            stats: StepStats { evaluations: 1, ..Default::default() },
        };
        this.h = this.initial_step(f);
        this
    }

    fn scale(&self, i: usize, y: &[f64; N]) -> f64 {
        self.ctl.atol + self.ctl.rtol * y[i].abs()
    }

    fn initial_step(&mut self, f: &Rhs<N>) -> f64 {
        let (mut dnf, mut dny) = (0.0, 0.0);
        for i in 0..N {
            let sk = self.scale(i, &self.y);
            dnf += (self.k1[i] / sk).powi(2);
            dny += (self.y[i] / sk).powi(2);
        }
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { (dny / dnf).sqrt() * 0.01 };
        h = h.min(self.ctl.h_max);
        let y1 = lin(&self.y, h * self.dir, &[(1.0, &self.k1)]);
        let f1 = f(self.t + h * self.dir, &y1);
        self.stats.evaluations += 1;
        let mut der2 = 0.0;
        for i in 0..N {
            der2 += ((f1[i] - self.k1[i]) / self.scale(i, &self.y)).powi(2);
        }
        let der2 = der2.sqrt() / h;
        let der12 = der2.max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / der12).powf(1.0 / 8.0) };
        (100.0 * h).min(h1).min(self.ctl.h_max)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    pub fn t_old(&self) -> f64 {
        self.t_old
    }

    pub fn y_old(&self) -> &[f64; N] {
        &self.y_old
    }

    /// Advance by one accepted step without passing `t_end`.
    pub fn step(&mut self, f: &Rhs<N>, t_end: f64) -> Result<(), StepError> {
        let mut rejected_last = false;
        loop {
            if self.stats.accepted + self.stats.rejected >= self.ctl.max_steps {
                return Err(StepError::MaxSteps);
            }
            let remaining = (t_end - self.t) * self.dir;
            let mut h = self.h.min(self.ctl.h_max);
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            if h.abs() <= 10.0 * f64::EPSILON * self.t.abs().max(1.0) {
                return Err(StepError::StepSizeUnderflow);
            }
            let hs = h * self.dir;
            let tr = trial(f, self.t, &self.y, &self.k1, hs);
            self.stats.evaluations += 11;
            let k = &tr.k;
            let inc = sum(&[(B1, &k[1]), (B6, &k[6]), (B7, &k[7]), (B8, &k[8]), (B9, &k[9]), (B10, &k[10]), (B11, &k[11]), (B12, &k[12])]);
            let (mut err, mut err2) = (0.0, 0.0);
            for i in 0..N {
                let sk = self.ctl.atol + self.ctl.rtol * self.y[i].abs().max(tr.y_new[i].abs());
                let bhh = inc[i]
                    - BHH1 * k[1][i]
                    - BHH2 * k[9][i]
                    - BHH3 * k[12][i];
                err2 += (bhh / sk).powi(2);
                let e = ER1 * k[1][i]
                    + ER6 * k[6][i]
                    + ER7 * k[7][i]
                    + ER8 * k[8][i]
                    + ER9 * k[9][i]
                    + ER10 * k[10][i]
                    + ER11 * k[11][i]
                    + ER12 * k[12][i];
                err += (e / sk).powi(2);
            }
            let mut deno = err + 0.01 * err2;
            if deno <= 0.0 {
                deno = 1.0;
            }
            let err = h * err * (1.0 / (deno * N as f64)).sqrt();
            if !err.is_finite() || tr.y_new.iter().any(|v| !v.is_finite()) {
                if h < 1e-300 {
                    return Err(StepError::NonFinite);
                }
                self.h = h * 0.1;
                self.stats.rejected += 1;
                rejected_last = true;
                continue;
            }
            let fac11 = err.powf(1.0 / 8.0);
            let fac = (1.0 / FAC2).max((1.0 / FAC1).min(fac11 / SAFE));
            let mut h_new = h / fac;
            if err <= 1.0 {
                self.facold = err.max(1e-4);
                let t_new = if last { t_end } else { self.t + hs };
                let k13 = f(t_new, &tr.y_new);
                self.stats.evaluations += 1;
                self.stats.accepted += 1;
                self.t_old = self.t;
                self.y_old = self.y;
                self.h_old = hs;
                self.k = tr.k;
                self.k[13] = k13;
                self.k[14] = [f64::NAN; N];
                self.t = t_new;
                self.y = tr.y_new;
                self.k1 = k13;
                if rejected_last {
                    h_new = h_new.min(h);
                }
                self.h = h_new;
                return Ok(());
            }
            self.h = h / (1.0 / FAC1).min(fac11 / SAFE);
            self.stats.rejected += 1;
            rejected_last = true;
        }
    }

    /// Dense output over the last accepted step (three extra evaluations).
    pub fn dense(&mut self, f: &Rhs<N>) -> DenseStep<N> {
        let h = self.h_old;
        let (y0, y1) = (&self.y_old, &self.y);
        let k = &mut self.k;
        let mut cont = [[0.0; N]; 8];
        for i in 0..N {
            let ydiff = y1[i] - y0[i];
            let bspl = h * k[1][i] - ydiff;
            cont[0][i] = y0[i];
            cont[1][i] = ydiff;
            cont[2][i] = bspl;
            cont[3][i] = ydiff - h * k[13][i] - bspl;
        }
        let d = |c: [f64; 8], k: &[[f64; N]; 17]| {
            sum(&[(c[0], &k[1]), (c[1], &k[6]), (c[2], &k[7]), (c[3], &k[8]), (c[4], &k[9]), (c[5], &k[10]), (c[6], &k[11]), (c[7], &k[12])])
        };
        let mut c4 = d([D41, D46, D47, D48, D49, D410, D411, D412], k);
        let mut c5 = d([D51, D56, D57, D58, D59, D510, D511, D512], k);
        let mut c6 = d([D61, D66, D67, D68, D69, D610, D611, D612], k);
        let mut c7 = d([D71, D76, D77, D78, D79, D710, D711, D712], k);
        let t = self.t_old;
        k[14] = f(
            t + C14 * h,
            &lin(
                y0,
                h,
                &[(A141, &k[1]), (A147, &k[7]), (A148, &k[8]), (A149, &k[9]), (A1410, &k[10]), (A1411, &k[11]), (A1412, &k[12]), (A1413, &k[13])],
            ),
        );
        k[15] = f(
            t + C15 * h,
            &lin(
                y0,
                h,
                &[(A151, &k[1]), (A156, &k[6]), (A157, &k[7]), (A158, &k[8]), (A1511, &k[11]), (A1512, &k[12]), (A1513, &k[13]), (A1514, &k[14])],
            ),
        );
        k[16] = f(
            t + C16 * h,
            &lin(
                y0,
                h,
                &[(A161, &k[1]), (A166, &k[6]), (A167, &k[7]), (A168, &k[8]), (A169, &k[9]), (A1613, &k[13]), (A1614, &k[14]), (A1615, &k[15])],
            ),
        );
        self.stats.evaluations += 3;
        let tail = |c: &mut [f64; N], d13: f64, d14: f64, d15: f64, d16: f64| {
            for i in 0..N {
                c[i] = h * (c[i] + d13 * k[13][i] + d14 * k[14][i] + d15 * k[15][i] + d16 * k[16][i]);
            }
        };
        tail(&mut c4, D413, D414, D415, D416);
        tail(&mut c5, D513, D514, D515, D516);
        tail(&mut c6, D613, D614, D615, D616);
        tail(&mut c7, D713, D714, D715, D716);
        cont[4] = c4;
        cont[5] = c5;
        cont[6] = c6;
        cont[7] = c7;
        DenseStep { t_old: self.t_old, h, cont }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctl() -> StepControl {
        StepControl { rtol: 1e-12, atol: 1e-14, h_max: f64::INFINITY, max_steps: 1_000_000 }
    }

    #[test]
    fn harmonic_oscillator_over_many_periods() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let mut s = Dop853::new(&f, 0.0, [1.0, 0.0], 100.0, ctl());
        while s.t() < 100.0 {
            s.step(&f, 100.0).unwrap();
        }
        assert_eq!(s.t(), 100.0);
        assert!((s.y()[0] - 100f64.cos()).abs() < 1e-9);
        assert!((s.y()[1] + 100f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn dense_output_matches_solution_inside_steps() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let c = StepControl { rtol: 1e-10, atol: 1e-12, ..ctl() };
        let mut s = Dop853::new(&f, 0.0, [1.0], 3.0, c);
        let mut worst: f64 = 0.0;
        while s.t() < 3.0 {
            s.step(&f, 3.0).unwrap();
            let d = s.dense(&f);
            for j in 0..=10 {
                let t = d.t_old + d.h * j as f64 / 10.0;
                worst = worst.max((d.eval(t)[0] - t.exp()).abs() / t.exp());
            }
            assert!((d.eval(d.t_new())[0] - s.y()[0]).abs() < 1e-14 * s.y()[0]);
        }
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn backward_integration() {
        let f = |_t: f64, y: &[f64; 1]| [-2.0 * y[0]];
        let mut s = Dop853::new(&f, 1.0, [1.0], 0.0, ctl());
        while s.t() > 0.0 {
            s.step(&f, 0.0).unwrap();
        }
        assert!((s.y()[0] - 2f64.exp()).abs() < 1e-10);
    }
}
