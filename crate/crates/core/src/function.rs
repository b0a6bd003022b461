//! Closed-form entire functions evaluated in log scale.
//!
//! Every family carries analytic formulas for `log f`, `f'/f` and `(f'/f)'`,
//! so growth and tract computations never need `|f|` itself. This matters
//! for the lacunary example, where `log|f|` reaches `2^(2^n)`, and for the
//! dimension pipeline, which works at radii where `|f|` is `e^(10^8)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{lit, to_f64, Real, C};

/// Threshold on `|Im u|` beyond which `log cos u` switches to its
/// exponential asymptotic form.
const COS_FAR: f64 = 15.0;

/// One multiplicative primitive of an [`AnalyticMap`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Factor<T> {
    /// `exp(slope * z + offset)`
    ExpLinear { slope: C<T>, offset: C<T> },
    /// `cos(freq * z + phase)`; `sin` is a phase shift of this.
    Cos { freq: C<T>, phase: C<T> },
    /// `exp(-g(z))` with `g(z) = sum_{k=1}^{terms} (z / 2^k)^(2^k)`.
    ExpNegLacunary { terms: u32 },
}

/// A determination of `log f(z)` with continuously tracked argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue<T> {
    pub log_modulus: T,
    pub argument: T,
}

impl<T: Real> LogValue<T> {
    pub fn new(log_modulus: T, argument: T) -> Self {
        Self { log_modulus, argument }
    }

    pub fn as_complex(&self) -> C<T> {
        C::new(self.log_modulus, self.argument)
    }

    pub fn from_complex(w: C<T>) -> Self {
        Self::new(w.re, w.im)
    }

    /// `exp` of the value, i.e. `f(z)`; overflows like `f64` would.
    pub fn exp(&self) -> C<T> {
        self.as_complex().exp()
    }
}

/// Region where `log f(z) = slope * z + offset` up to an exponentially small
/// error, obtained by replacing every cosine factor by its dominant
/// exponential. Each cosine factor `cos(freq z + phase)` is stored with the
/// required sign of `Im(freq z + phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldChart<T> {
    pub slope: C<T>,
    pub offset: C<T>,
    cosines: Vec<(C<T>, C<T>, i8)>,
}

impl<T: Real> FarFieldChart<T> {
    /// Smallest `|Im u_i|` over the cosine factors at `z = exp(zeta)`, as a
    /// natural log, or `None` when some factor has the wrong sign. Works for
    /// `Re zeta` far beyond the `f64` exponent range.
    pub fn log_depth(&self, zeta: C<T>) -> Option<T> {
        let mut depth = T::infinity();
        for &(freq, phase, sign) in &self.cosines {
            let (s, l) = signed_log_im(freq, phase, zeta)?;
            if s != sign {
                return None;
            }
            depth = depth.min(l);
        }
        Some(depth)
    }

    /// Whether the chart applies at `exp(zeta)` with at least `min_im`
    /// clearance on every cosine factor.
    pub fn covers(&self, zeta: C<T>, min_im: T) -> bool {
        match self.log_depth(zeta) {
            Some(d) => d >= min_im.ln(),
            None => false,
        }
    }

    /// Bound on `|log f - (slope z + offset)|` (and on the relative error of
    /// `F' = slope * z`) at `exp(zeta)`. Each cosine contributes
    /// `|log1p(q)| <= 2|q|` with `|q| = exp(-2|Im u|)`.
    pub fn error_bound(&self, zeta: C<T>) -> T {
        match self.log_depth(zeta) {
            Some(_) if self.cosines.is_empty() => T::zero(),
            Some(d) => {
                let im = if d > lit(700.0) { T::infinity() } else { d.exp() };
                let n: T = lit(self.cosines.len() as f64);
                n * lit::<T>(4.0) * (-(im + im)).exp()
            }
            None => T::infinity(),
        }
    }

    /// Inverse of the chart: the `zeta` with `slope * exp(zeta) + offset = omega`,
    /// principal in the logarithm.
    pub fn invert(&self, omega: C<T>) -> C<T> {
        ((omega - self.offset) / self.slope).ln()
    }

    pub fn is_exact(&self) -> bool {
        self.cosines.is_empty()
    }
}

/// `(sign, ln|Im(freq * exp(zeta) + phase)|)`, robust for huge `Re zeta`.
fn signed_log_im<T: Real>(freq: C<T>, phase: C<T>, zeta: C<T>) -> Option<(i8, T)> {
    let s = (freq.arg() + zeta.im).sin();
    if s == T::zero() {
        return None;
    }
    let m = freq.norm().ln() + zeta.re + s.abs().ln();
    let value = if m < lit(600.0) {
        s.signum() * m.exp() + phase.im
    } else {
        return Some((if s > T::zero() { 1 } else { -1 }, m));
    };
    if value == T::zero() {
        return None;
    }
    Some((if value > T::zero() { 1 } else { -1 }, value.abs().ln()))
}

/// An entire function given as a product of closed-form primitives,
/// together with the tract level `R` and configured asymptotic values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticMap<T> {
    pub name: String,
    pub factors: Vec<Factor<T>>,
    pub boundary_value: T,
    pub asymptotic_values: Vec<C<T>>,
}

impl<T: Real> AnalyticMap<T> {
    pub fn product(name: impl Into<String>, factors: Vec<Factor<T>>, boundary_value: T) -> Self {
        Self {
            name: name.into(),
            factors,
            boundary_value,
            asymptotic_values: Vec::new(),
        }
    }

    /// `f(z) = e^z`.
    pub fn exp(boundary_value: T) -> Self {
        let mut m = Self::product(
            "exp",
            vec![Factor::ExpLinear {
                slope: C::new(T::one(), T::zero()),
                offset: C::new(T::zero(), T::zero()),
            }],
            boundary_value,
        );
        m.asymptotic_values = vec![C::new(T::zero(), T::zero())];
        m
    }

    /// `f(z) = cos(z) e^z`; its only finite asymptotic value is 0.
    pub fn cos_exp(boundary_value: T) -> Self {
        let mut m = Self::product(
            "cos_exp",
            vec![
                Factor::Cos {
                    freq: C::new(T::one(), T::zero()),
                    phase: C::new(T::zero(), T::zero()),
                },
                Factor::ExpLinear {
                    slope: C::new(T::one(), T::zero()),
                    offset: C::new(T::zero(), T::zero()),
                },
            ],
            boundary_value,
        );
        m.asymptotic_values = vec![C::new(T::zero(), T::zero())];
        m
    }

    /// `f(z) = exp(-g(z))` with the lacunary series truncated after `terms`.
    pub fn exp_neg_lacunary(terms: u32, boundary_value: T) -> Self {
        Self::product(
            "exp_neg_lacunary",
            vec![Factor::ExpNegLacunary { terms }],
            boundary_value,
        )
    }

    pub fn with_asymptotic_values(mut self, values: Vec<C<T>>) -> Self {
        self.asymptotic_values = values;
        self
    }

    /// True when every coefficient is real, so `f(conj z) = conj f(z)`.
    pub fn has_real_coefficients(&self) -> bool {
        self.factors.iter().all(|f| match f {
            Factor::ExpLinear { slope, offset } => slope.im == T::zero() && offset.im == T::zero(),
            Factor::Cos { freq, phase } => freq.im == T::zero() && phase.im == T::zero(),
            Factor::ExpNegLacunary { .. } => true,
        })
    }

    /// A determination of `log f(z)`; its imaginary part is only meaningful
    /// modulo `2 pi` (use [`continue_log`] for a tracked argument).
    pub fn log_value(&self, z: C<T>) -> C<T> {
        self.factors
            .iter()
            .fold(C::new(T::zero(), T::zero()), |acc, f| acc + factor_log(f, z))
    }

    /// `log|f(z)|`, valid far beyond the overflow of `|f|`; `-inf` at zeros.
    pub fn log_modulus(&self, z: C<T>) -> T {
        let mut s = T::zero();
        for f in &self.factors {
            let l = factor_log(f, z).re;
            if l == T::neg_infinity() || l.is_nan() {
                return T::neg_infinity();
            }
            s = s + l;
        }
        s
    }

    /// `v(z) = max(log|f(z)| - log R, 0)`.
    pub fn v(&self, z: C<T>) -> T {
        (self.log_modulus(z) - self.boundary_value.ln()).max(T::zero())
    }

    /// `f(z)`, or [`Error::Overflow`] when `|f(z)|` is not representable.
    pub fn eval(&self, z: C<T>) -> Result<C<T>> {
        let lv = self.log_value(z);
        if lv.re > T::max_value().ln() {
            return Err(Error::Overflow {
                log_modulus: to_f64(lv.re),
            });
        }
        if lv.re == T::neg_infinity() {
            return Ok(C::new(T::zero(), T::zero()));
        }
        Ok(lv.exp())
    }

    /// `f'(z) / f(z)`.
    pub fn dlog(&self, z: C<T>) -> C<T> {
        self.factors
            .iter()
            .fold(C::new(T::zero(), T::zero()), |acc, f| acc + factor_dlog(f, z).0)
    }

    /// `(f'/f)'(z)`.
    pub fn dlog_prime(&self, z: C<T>) -> C<T> {
        self.factors
            .iter()
            .fold(C::new(T::zero(), T::zero()), |acc, f| acc + factor_dlog(f, z).1)
    }

    /// `z f'(z) / f(z)`, the quantity `A(z)` of maximum-modulus curve theory.
    pub fn log_derivative(&self, z: C<T>) -> Result<C<T>> {
        let l = self.dlog(z);
        if !(l.re.is_finite() && l.im.is_finite()) || self.log_modulus(z) == T::neg_infinity() {
            return Err(Error::NearZeroOfF(to_f64(z.re), to_f64(z.im)));
        }
        Ok(z * l)
    }

    /// `B(z) = z A'(z)` with `A(z) = z f'/f`.
    pub fn tyler_b(&self, z: C<T>) -> C<T> {
        z * (self.dlog(z) + z * self.dlog_prime(z))
    }

    /// `f'(z)`.
    pub fn derivative(&self, z: C<T>) -> Result<C<T>> {
        Ok(self.eval(z)? * self.dlog(z))
    }

    /// A determination of `log f'(z) = log f + log(f'/f)`.
    pub fn log_fprime(&self, z: C<T>) -> C<T> {
        self.log_value(z) + self.dlog(z).ln()
    }

    /// `f''/f' = L + L'/L` with `L = f'/f`.
    pub fn dlog_fprime(&self, z: C<T>) -> C<T> {
        let l = self.dlog(z);
        l + self.dlog_prime(z) / l
    }

    /// Newton step for a zero of `f'`: `f'/f'' = L / (L' + L^2)`.
    pub fn critical_newton_step(&self, z: C<T>) -> C<T> {
        let l = self.dlog(z);
        l / (self.dlog_prime(z) + l * l)
    }

    /// All far-field charts of the map: one per sign pattern of the cosine
    /// factors. Empty when a factor has no exponential asymptotics.
    pub fn far_field_charts(&self) -> Vec<FarFieldChart<T>> {
        let mut slope = C::new(T::zero(), T::zero());
        let mut offset = C::new(T::zero(), T::zero());
        let mut cos = Vec::new();
        for f in &self.factors {
            match f {
                Factor::ExpLinear { slope: s, offset: o } => {
                    slope = slope + s;
                    offset = offset + o;
                }
                Factor::Cos { freq, phase } => cos.push((*freq, *phase)),
                Factor::ExpNegLacunary { .. } => return Vec::new(),
            }
        }
        let ln2 = T::LN_2();
        let i = C::new(T::zero(), T::one());
        (0..(1usize << cos.len()))
            .map(|mask| {
                let mut c = slope;
                let mut d = offset;
                let mut cosines = Vec::with_capacity(cos.len());
                for (k, &(freq, phase)) in cos.iter().enumerate() {
                    // Im u > 0: cos u ~ exp(-iu)/2; Im u < 0: cos u ~ exp(iu)/2.
                    let sign: i8 = if mask & (1 << k) == 0 { 1 } else { -1 };
                    let sg: T = lit(sign as f64);
                    c = c - i * freq * sg;
                    d = d - i * phase * sg - C::new(ln2, T::zero());
                    cosines.push((freq, phase, sign));
                }
                FarFieldChart {
                    slope: c,
                    offset: d,
                    cosines,
                }
            })
            .collect()
    }
}

fn factor_log<T: Real>(f: &Factor<T>, z: C<T>) -> C<T> {
    match f {
        Factor::ExpLinear { slope, offset } => slope * z + offset,
        Factor::Cos { freq, phase } => log_cos(freq * z + phase),
        Factor::ExpNegLacunary { terms } => -lacunary(z, *terms).0,
    }
}

/// `(L, L')` for one factor, where `L = f'/f`.
fn factor_dlog<T: Real>(f: &Factor<T>, z: C<T>) -> (C<T>, C<T>) {
    match f {
        Factor::ExpLinear { slope, .. } => (*slope, C::new(T::zero(), T::zero())),
        Factor::Cos { freq, phase } => {
            let t = tan_stable(freq * z + phase);
            let one = C::new(T::one(), T::zero());
            (-freq * t, -freq * freq * (one + t * t))
        }
        Factor::ExpNegLacunary { terms } => {
            let (_, g1, g2) = lacunary(z, *terms);
            (-g1, -g2)
        }
    }
}

/// `log cos u` without overflow for large `|Im u|`.
pub fn log_cos<T: Real>(u: C<T>) -> C<T> {
    let far: T = lit(COS_FAR);
    let i = C::new(T::zero(), T::one());
    let ln2 = C::new(T::LN_2(), T::zero());
    if u.im > far {
        -i * u - ln2 + ln_1p((i * (u + u)).exp())
    } else if u.im < -far {
        i * u - ln2 + ln_1p((-i * (u + u)).exp())
    } else {
        u.cos().ln()
    }
}

/// `tan u` from the bounded exponential `exp(±2iu)`.
pub fn tan_stable<T: Real>(u: C<T>) -> C<T> {
    let i = C::new(T::zero(), T::one());
    let one = C::new(T::one(), T::zero());
    if u.im >= T::zero() {
        let q = (i * (u + u)).exp();
        i * (one - q) / (one + q)
    } else {
        let q = (-i * (u + u)).exp();
        -i * (one - q) / (one + q)
    }
}

fn ln_1p<T: Real>(q: C<T>) -> C<T> {
    if q.norm() < lit(1e-4) {
        // q - q^2/2 + q^3/3
        let q2 = q * q;
        q - q2 * lit::<T>(0.5) + q2 * q / lit::<T>(3.0)
    } else {
        (C::new(T::one(), T::zero()) + q).ln()
    }
}

/// `(g, g', g'')` for `g(z) = sum_{k=1}^{terms} (z/2^k)^(2^k)`.
pub fn lacunary<T: Real>(z: C<T>, terms: u32) -> (C<T>, C<T>, C<T>) {
    let zero = C::new(T::zero(), T::zero());
    let (mut g, mut g1, mut g2) = (zero, zero, zero);
    for k in 1..=terms {
        let scale: T = lit(2f64.powi(k as i32));
        let w = z / scale;
        let m = 1u64 << k;
        let wm2 = powu(w, m - 2);
        let wm1 = wm2 * w;
        g = g + wm1 * w;
        g1 = g1 + wm1;
        let coeff: T = lit::<T>((m - 1) as f64) / scale;
        g2 = g2 + wm2 * coeff;
    }
    (g, g1, g2)
}

fn powu<T: Real>(mut base: C<T>, mut e: u64) -> C<T> {
    let mut acc = C::new(T::one(), T::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// Smallest `K >= 1` such that the lacunary tail `sum_{k>K} (r/2^k)^(2^k)`
/// is below `tol` on `|z| <= max_radius`.
pub fn truncate_lacunary(max_radius: f64, tol: f64) -> u32 {
    assert!(max_radius > 0.0 && tol > 0.0);
    let log_term = |k: u32| 2f64.powi(k as i32) * (max_radius.ln() - k as f64 * std::f64::consts::LN_2);
    let log_tol = tol.ln();
    for big_k in 1..62u32 {
        let tail = crate::num::log_sum_exp(((big_k + 1)..64).map(log_term));
        if tail < log_tol {
            return big_k;
        }
    }
    62
}

/// Continue `log f` along a polyline from `seed` at `path[0]`.
///
/// Segments are bisected until the predicted change `f'/f dz` is below
/// `pi/4` and agrees with the observed change modulo `2 pi`.
pub fn continue_log<T: Real>(
    map: &AnalyticMap<T>,
    path: &[C<T>],
    seed: LogValue<T>,
) -> Result<LogValue<T>> {
    let end = track_log(
        path,
        seed.as_complex(),
        |z| map.log_value(z),
        |z| map.dlog(z),
    )?;
    Ok(LogValue::from_complex(end))
}

/// Generic argument tracker: `logf` returns any determination of a
/// logarithm, `dlog` its derivative. Returns the continued value at the end
/// of the polyline.
pub fn track_log<T, F, D>(path: &[C<T>], seed: C<T>, logf: F, dlog: D) -> Result<C<T>>
where
    T: Real,
    F: Fn(C<T>) -> C<T>,
    D: Fn(C<T>) -> C<T>,
{
    let mut acc = seed;
    for seg in path.windows(2) {
        acc = acc + track_segment(seg[0], seg[1], &logf, &dlog, 0)?;
    }
    Ok(acc)
}

/// Continued values at every vertex of the polyline.
pub fn track_log_all<T, F, D>(path: &[C<T>], seed: C<T>, logf: F, dlog: D) -> Result<Vec<C<T>>>
where
    T: Real,
    F: Fn(C<T>) -> C<T>,
    D: Fn(C<T>) -> C<T>,
{
    let mut out = Vec::with_capacity(path.len());
    let mut acc = seed;
    out.push(acc);
    for seg in path.windows(2) {
        acc = acc + track_segment(seg[0], seg[1], &logf, &dlog, 0)?;
        out.push(acc);
    }
    Ok(out)
}

const MAX_DEPTH: u32 = 40;

fn track_segment<T, F, D>(a: C<T>, b: C<T>, logf: &F, dlog: &D, depth: u32) -> Result<C<T>>
where
    T: Real,
    F: Fn(C<T>) -> C<T>,
    D: Fn(C<T>) -> C<T>,
{
    if a == b {
        return Ok(C::new(T::zero(), T::zero()));
    }
    let half: T = lit(0.5);
    let mid = (a + b) * half;
    let pred = dlog(mid) * (b - a);
    let quarter_pi = T::FRAC_PI_4();
    let split = |depth: u32| -> Result<C<T>> {
        if depth >= MAX_DEPTH {
            return Err(Error::StepTooLarge(to_f64(mid.re), to_f64(mid.im)));
        }
        Ok(track_segment(a, mid, logf, dlog, depth + 1)? + track_segment(mid, b, logf, dlog, depth + 1)?)
    };
    if !(pred.re.is_finite() && pred.im.is_finite()) {
        if depth >= MAX_DEPTH {
            return Err(Error::ZeroOnPath(to_f64(mid.re), to_f64(mid.im)));
        }
        return split(depth);
    }
    if pred.norm() > quarter_pi {
        return split(depth);
    }
    let la = logf(a);
    let lb = logf(b);
    if !(la.re.is_finite() && lb.re.is_finite()) {
        return Err(Error::ZeroOnPath(to_f64(mid.re), to_f64(mid.im)));
    }
    let obs = lb - la;
    let two_pi = T::PI() + T::PI();
    let k = ((obs.im - pred.im) / two_pi).round();
    let inc = C::new(obs.re, obs.im - k * two_pi);
    if (inc.im - pred.im).abs() > quarter_pi {
        return split(depth);
    }
    Ok(inc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    type C64 = C<f64>;

    #[test]
    fn exp_identity_at_origin() {
        let m = AnalyticMap::<f64>::exp(1.0);
        assert_eq!(m.eval(C64::new(0.0, 0.0)).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(m.log_modulus(C64::new(7.5, 3.0)), 7.5);
        assert_eq!(m.log_derivative(C64::new(2.0, -1.0)).unwrap(), C64::new(2.0, -1.0));
    }

    #[test]
    fn cos_exp_at_i_pi() {
        // cos(i pi) e^{i pi} = -cosh(pi)
        let m = AnalyticMap::<f64>::cos_exp(1.0);
        let v = m.eval(C64::new(0.0, PI)).unwrap();
        assert_relative_eq!(v.re, -PI.cosh(), max_relative = 1e-13);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn cos_exp_log_modulus_closed_form() {
        let m = AnalyticMap::<f64>::cos_exp(1.0);
        for &(x, y) in &[(0.3f64, 0.7f64), (5.0, -2.0), (-3.0, 40.0), (100.0, 100.0)] {
            let expect = x + 0.5 * (x.cos().powi(2) + y.sinh().powi(2)).ln();
            assert_relative_eq!(m.log_modulus(C64::new(x, y)), expect, max_relative = 1e-12);
        }
        // far beyond float overflow of |f|
        let big = m.log_modulus(C64::new(1.0e6, 1.0e6));
        assert_relative_eq!(big, 2.0e6 - 2f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn cos_exp_log_derivative_at_0_2() {
        let m = AnalyticMap::<f64>::cos_exp(1.0);
        let a = m.log_derivative(C64::new(0.2, 0.0)).unwrap();
        assert_relative_eq!(a.re, 0.2 * (1.0 - 0.2f64.tan()), max_relative = 1e-13);
        assert_relative_eq!(a.re, 0.159457, epsilon = 1e-6);
    }

    #[test]
    fn lacunary_at_zero_and_twenty() {
        let m = AnalyticMap::<f64>::exp_neg_lacunary(3, 1.0);
        assert_eq!(m.eval(C64::new(0.0, 0.0)).unwrap(), C64::new(1.0, 0.0));
        // g(20) = 10^2 + 5^4 + 2.5^8
        let expect = -(100.0 + 625.0 + 2.5f64.powi(8));
        assert_relative_eq!(m.log_modulus(C64::new(20.0, 0.0)), expect, max_relative = 1e-14);
        assert_relative_eq!(expect, -2250.87890625, max_relative = 1e-15);
        assert!(m.eval(C64::new(20.0, 0.0)).is_ok());
        // on the imaginary axis the dominant term is (iy/8)^8 > 0 again
        let m3 = AnalyticMap::<f64>::exp_neg_lacunary(3, 1.0);
        let g = 100.0 * -1.0 + 625.0 + 2.5f64.powi(8);
        assert_relative_eq!(m3.log_modulus(C64::new(0.0, 20.0)), -g, max_relative = 1e-14);
    }

    #[test]
    fn overflow_is_signalled() {
        let m = AnalyticMap::<f64>::exp(1.0);
        assert!(matches!(
            m.eval(C64::new(800.0, 0.0)),
            Err(Error::Overflow { .. })
        ));
        assert_eq!(m.log_modulus(C64::new(800.0, 0.0)), 800.0);
    }

    #[test]
    fn truncation_orders() {
        assert_eq!(truncate_lacunary(20.0, 1e-12), 5);
        // tail after K=3 is (1/16)^16 ~ 5.4e-20
        assert_eq!(truncate_lacunary(1.0, 1e-12), 3);
        assert_eq!(truncate_lacunary(0.5, 0.5), 1);
    }

    #[test]
    fn continue_log_exp_vertical() {
        let m = AnalyticMap::<f64>::exp(1.0);
        let path = [C64::new(0.0, 0.0), C64::new(0.0, 2.0 * PI)];
        let out = continue_log(&m, &path, LogValue::new(0.0, 0.0)).unwrap();
        assert!(out.log_modulus.abs() < 1e-12);
        assert_relative_eq!(out.argument, 2.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn continue_log_single_point_keeps_seed() {
        let m = AnalyticMap::<f64>::cos_exp(1.0);
        let seed = LogValue::new(1.5, -0.25);
        let out = continue_log(&m, &[C64::new(3.0, 1.0)], seed).unwrap();
        assert_eq!(out, seed);
    }

    #[test]
    fn winding_around_simple_zero() {
        // cos(z)e^z around pi/2 picks up 2 pi i from the zero plus nothing
        // from e^z on a closed loop.
        let m = AnalyticMap::<f64>::cos_exp(1.0);
        let c = PI / 2.0;
        let path: Vec<C64> = (0..=64)
            .map(|k| C64::new(c, 0.0) + C64::from_polar(0.5, k as f64 * 2.0 * PI / 64.0))
            .collect();
        let seed = LogValue::from_complex(m.log_value(path[0]));
        let out = continue_log(&m, &path, seed).unwrap();
        assert_relative_eq!(out.argument - seed.argument, 2.0 * PI, epsilon = 1e-9);
        // independent oracle: dense sampling of arg f with unwrapping
        let mut total = 0.0;
        let n = 20000;
        for k in 0..n {
            let z0 = C64::new(c, 0.0) + C64::from_polar(0.5, k as f64 * 2.0 * PI / n as f64);
            let z1 = C64::new(c, 0.0) + C64::from_polar(0.5, (k + 1) as f64 * 2.0 * PI / n as f64);
            let f0 = z0.cos() * z0.exp();
            let f1 = z1.cos() * z1.exp();
            total += (f1 / f0).arg();
        }
        assert_relative_eq!(total, 2.0 * PI, epsilon = 1e-9);
    }

    #[test]
    fn zero_on_path_detected() {
        let m = AnalyticMap::<f64>::cos_exp(1.0);
        let path = [C64::new(1.0, 0.0), C64::new(2.0, 0.0)];
        let seed = LogValue::from_complex(m.log_value(path[0]));
        assert!(continue_log(&m, &path, seed).is_err());
    }

    #[test]
    fn far_field_charts_of_cos_exp() {
        let m = AnalyticMap::<f64>::cos_exp(1.0);
        let charts = m.far_field_charts();
        assert_eq!(charts.len(), 2);
        let upper = &charts[0];
        assert_eq!(upper.slope, C64::new(1.0, -1.0));
        assert_relative_eq!(upper.offset.re, -2f64.ln());
        let z = C64::new(-30.0, 35.0);
        let zeta = z.ln();
        assert!(upper.covers(zeta, 20.0));
        assert!(!charts[1].covers(zeta, 20.0));
        let lin = upper.slope * z + upper.offset;
        let exact = m.log_value(z);
        let diff = lin - exact;
        let k = (diff.im / (2.0 * PI)).round();
        assert!((C64::new(diff.re, diff.im - 2.0 * PI * k)).norm() <= upper.error_bound(zeta) + 1e-13);
        // inverse of the chart lands back on z
        let back = upper.invert(lin).exp();
        assert!((back - z).norm() < 1e-9);
        // a point with Re zeta = 1e8 is still classified
        assert!(upper.covers(C64::new(1.0e8, 3.0 * PI / 4.0), 20.0));
        assert_eq!(upper.error_bound(C64::new(1.0e8, 3.0 * PI / 4.0)), 0.0);
    }

    #[test]
    fn exp_chart_is_exact() {
        let m = AnalyticMap::<f64>::exp(1.0);
        let ch = m.far_field_charts();
        assert_eq!(ch.len(), 1);
        assert!(ch[0].is_exact());
        assert!(AnalyticMap::<f64>::exp_neg_lacunary(4, 1.0).far_field_charts().is_empty());
    }

    #[test]
    fn f32_instantiation() {
        let m = AnalyticMap::<f32>::cos_exp(1.0);
        let v = m.log_modulus(C::<f32>::new(3.0, 4.0));
        let expect = 3.0f64 + 0.5 * (3f64.cos().powi(2) + 4f64.sinh().powi(2)).ln();
        assert!((v as f64 - expect).abs() < 1e-5);
    }
}
