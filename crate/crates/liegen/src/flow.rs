//! Numeric flow maps of polynomial vector fields, blow-up detection, and a
//! sound local-nilpotency checker.
//!
//! [`integrate`] advances `dz/dr = e^{i theta} W(z)` for real `r` in
//! `[0, t_max]` with an adaptive Dormand-Prince 5(4) pair under PI step
//! control. Escape to infinity in finite time is reported as
//! [`FlowStatus::BlowUp`]: either the state norm crosses `blowup_norm`, or
//! the step size collapses while the state has grown far beyond its initial
//! scale (the pole forces the step size below what the time variable can
//! resolve long before any large threshold is met). A step-size collapse
//! without that growth signature is reported as
//! [`FlowStatus::StepUnderflow`].

use crate::algebra::Polynomial;
use crate::vectorfield::VectorField;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use std::collections::HashSet;
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FlowError {
    #[error("invalid flow request: {0}")]
    InvalidRequest(String),
    #[error("step limit exceeded at t = {t}")]
    StepLimit { t: f64 },
    #[error("time {t} is outside the existence interval [0, 1/7)")]
    OutsideDomain { t: f64 },
}

/// Integration request. Tolerances and thresholds must be positive;
/// `blowup_norm` may be infinite to disable blow-up classification.
#[derive(Debug, Clone)]
pub struct FlowRequest {
    pub field: VectorField,
    pub start: Vec<Complex64>,
    pub t_max: f64,
    /// Direction of the complex time ray, in radians.
    pub theta: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub blowup_norm: f64,
    pub min_step: f64,
}

impl FlowRequest {
    pub fn new(field: VectorField, start: Vec<Complex64>, t_max: f64) -> Self {
        FlowRequest {
            field,
            start,
            t_max,
            theta: 0.0,
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            blowup_norm: 1e8,
            min_step: 1e-13,
        }
    }

    pub fn from_real_start(field: VectorField, start: &[f64], t_max: f64) -> Self {
        let start = start.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(field, start, t_max)
    }

    fn validate(&self) -> Result<(), FlowError> {
        let n = self.field.dim();
        if self.start.len() != n {
            return Err(FlowError::InvalidRequest(format!(
                "start has {} components, field has dimension {n}",
                self.start.len()
            )));
        }
        if self.start.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(FlowError::InvalidRequest("non-finite start".into()));
        }
        if !self.t_max.is_finite() || self.t_max < 0.0 {
            return Err(FlowError::InvalidRequest("t_max must be finite and >= 0".into()));
        }
        if !self.theta.is_finite() {
            return Err(FlowError::InvalidRequest("theta must be finite".into()));
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(FlowError::InvalidRequest("tolerances must be positive".into()));
        }
        if !(self.blowup_norm > 0.0) {
            return Err(FlowError::InvalidRequest("blowup_norm must be positive".into()));
        }
        if !(self.min_step > 0.0) || !self.min_step.is_finite() {
            return Err(FlowError::InvalidRequest("min_step must be positive and finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowStatus {
    /// Integration reached the requested horizon.
    Reached { t: f64 },
    /// Finite-time escape detected; `t` estimates the escape time.
    BlowUp { t: f64 },
    /// Step size fell below `min_step` (or time resolution) with no
    /// blow-up signature.
    StepUnderflow { t: f64 },
}

/// Trajectory samples (strictly increasing `t`, starting at 0) plus the
/// termination status.
#[derive(Debug, Clone)]
pub struct FlowResult {
    pub samples: Vec<(f64, Vec<Complex64>)>,
    pub status: FlowStatus,
}

impl FlowResult {
    pub fn final_state(&self) -> &(f64, Vec<Complex64>) {
        self.samples.last().expect("at least the initial sample")
    }
}

/// Polynomial field compiled to f64 coefficients for fast evaluation.
struct CompiledField {
    slots: Vec<Vec<(f64, Vec<u32>)>>,
}

impl CompiledField {
    fn compile(field: &VectorField) -> Result<Self, FlowError> {
        let mut slots = Vec::with_capacity(field.dim());
        for i in 1..=field.dim() {
            let mut terms = Vec::new();
            for (m, c) in field.coeff(i).terms() {
                let c = c.to_f64().unwrap_or(f64::INFINITY);
                if !c.is_finite() {
                    return Err(FlowError::InvalidRequest(
                        "coefficient does not fit in f64".into(),
                    ));
                }
                terms.push((c, m.exponents().to_vec()));
            }
            slots.push(terms);
        }
        Ok(CompiledField { slots })
    }

    fn eval(&self, z: &[Complex64], phase: Complex64, out: &mut [Complex64]) {
        for (slot, terms) in self.slots.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, exps) in terms {
                let mut t = Complex64::new(*c, 0.0);
                for (zi, &e) in z.iter().zip(exps) {
                    if e > 0 {
                        t *= zi.powu(e);
                    }
                }
                acc += t;
            }
            out[slot] = phase * acc;
        }
    }
}

fn norm2(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const STEP_EXPONENT: f64 = 0.2 - BETA * 0.75;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 10.0;
const MAX_STEPS: usize = 10_000_000;
/// Growth factor beyond which a step-size collapse is classified as
/// blow-up rather than plain underflow.
const BLOWUP_GROWTH: f64 = 10.0;

/// Integrates the request, sampling once per accepted step.
pub fn integrate(req: &FlowRequest) -> Result<FlowResult, FlowError> {
    req.validate()?;
    let n = req.field.dim();
    let compiled = CompiledField::compile(&req.field)?;
    let phase = Complex64::from_polar(1.0, req.theta);

    let mut t = 0.0_f64;
    let mut y = req.start.clone();
    let mut samples = vec![(t, y.clone())];
    let start_norm = norm2(&y);
    let detect = req.blowup_norm.is_finite();

    if req.t_max == 0.0 {
        return Ok(FlowResult {
            samples,
            status: FlowStatus::Reached { t: 0.0 },
        });
    }
    if detect && start_norm > req.blowup_norm {
        return Ok(FlowResult {
            samples,
            status: FlowStatus::BlowUp { t: 0.0 },
        });
    }

    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    compiled.eval(&y, phase, &mut k[0]);
    let mut h = (req.t_max * 1e-4).max(req.min_step);
    let mut err_prev = 1e-4_f64;
    let mut stage = vec![Complex64::new(0.0, 0.0); n];

    for _ in 0..MAX_STEPS {
        if t >= req.t_max {
            return Ok(FlowResult {
                samples,
                status: FlowStatus::Reached { t },
            });
        }
        let underflow = h < req.min_step || t + h == t;
        if underflow {
            let status = if detect && norm2(&y) >= BLOWUP_GROWTH * start_norm.max(1.0) {
                FlowStatus::BlowUp { t }
            } else {
                FlowStatus::StepUnderflow { t }
            };
            return Ok(FlowResult { samples, status });
        }
        let last = h >= req.t_max - t;
        let h_step = if last { req.t_max - t } else { h };

        // stages 2..7; k[0] is f at the step start (FSAL)
        for s in 0..6 {
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += kj[i] * a;
                    }
                }
                stage[i] = y[i] + acc * h_step;
            }
            compiled.eval(&stage, phase, &mut k[s + 1]);
        }

        let mut y5 = vec![Complex64::new(0.0, 0.0); n];
        let mut err_norm_sq = 0.0_f64;
        for i in 0..n {
            let mut acc5 = Complex64::new(0.0, 0.0);
            let mut acc4 = Complex64::new(0.0, 0.0);
            for s in 0..7 {
                if B5[s] != 0.0 {
                    acc5 += k[s][i] * B5[s];
                }
                if B4[s] != 0.0 {
                    acc4 += k[s][i] * B4[s];
                }
            }
            y5[i] = y[i] + acc5 * h_step;
            let e = (acc5 - acc4) * h_step;
            let sc = req.abs_tol + req.rel_tol * y[i].norm().max(y5[i].norm());
            err_norm_sq += (e.norm() / sc).powi(2);
        }
        let err = (err_norm_sq / n as f64).sqrt();

        if err.is_finite() && err <= 1.0 {
            t = if last { req.t_max } else { t + h_step };
            y = y5;
            k[0] = k[6].clone(); // FSAL: last stage is f at the new point
            samples.push((t, y.clone()));
            if detect && norm2(&y) > req.blowup_norm {
                return Ok(FlowResult {
                    samples,
                    status: FlowStatus::BlowUp { t },
                });
            }
            let e = err.max(1e-16);
            let scale = (SAFETY * e.powf(-STEP_EXPONENT) * err_prev.powf(BETA))
                .clamp(MIN_SCALE, MAX_SCALE);
            h = h_step * scale;
            err_prev = e.max(1e-4);
        } else {
            let e = if err.is_finite() { err.max(1e-16) } else { 1e16 };
            let scale = (SAFETY * e.powf(-STEP_EXPONENT)).clamp(MIN_SCALE, 1.0);
            h = h_step * scale;
        }
    }
    Err(FlowError::StepLimit { t })
}

/// Exact solution of the diagonal flow of the degree-eight system
/// `x' = y^8, y' = x^4 y^4` from `(1, 1)`:
/// both components equal `(1 - 7t)^{-1/7}` for `0 <= t < 1/7`.
pub fn v_flow_closed_form(t: f64) -> Result<(f64, f64), FlowError> {
    if !(0.0..(1.0 / 7.0)).contains(&t) {
        return Err(FlowError::OutsideDomain { t });
    }
    let x = (1.0 - 7.0 * t).powf(-1.0 / 7.0);
    Ok((x, x))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NilpotencyVerdict {
    /// Every coordinate iterate reached zero; `bound` is the largest
    /// number of applications needed.
    Nilpotent { bound: usize },
    /// The iterate sequence of coordinate `witness` (1-based) revisited a
    /// nonzero polynomial, so it can never reach zero.
    NotNilpotent { witness: usize },
    /// Neither termination nor a cycle within the iteration budget.
    Inconclusive,
}

/// Iterates the derivation on each coordinate. Only sound verdicts are
/// returned: `Nilpotent` means every `W^m(z_i)` was computed to be exactly
/// zero, and `NotNilpotent` means some coordinate's iterates cycle.
pub fn check_locally_nilpotent(w: &VectorField, max_iter: usize) -> NilpotencyVerdict {
    assert!(max_iter >= 1, "max_iter must be at least 1");
    let n = w.dim();
    let mut bound = 0usize;
    let mut inconclusive = false;
    for i in 1..=n {
        let mut f = Polynomial::variable(n, i);
        let mut seen: HashSet<Polynomial> = HashSet::new();
        seen.insert(f.clone());
        let mut killed = None;
        for m in 1..=max_iter {
            f = w.apply(&f);
            if f.is_zero() {
                killed = Some(m);
                break;
            }
            if !seen.insert(f.clone()) {
                return NilpotencyVerdict::NotNilpotent { witness: i };
            }
        }
        match killed {
            Some(m) => bound = bound.max(m),
            None => inconclusive = true,
        }
    }
    if inconclusive {
        NilpotencyVerdict::Inconclusive
    } else {
        NilpotencyVerdict::Nilpotent { bound }
    }
}

/// Writes the trajectory as CSV with header
/// `t,re_z1,im_z1,...,re_zn,im_zn`, one row per accepted step.
pub fn write_trajectory_csv<W: Write>(result: &FlowResult, out: &mut W) -> io::Result<()> {
    let n = result.samples[0].1.len();
    write!(out, "t")?;
    for i in 1..=n {
        write!(out, ",re_z{i},im_z{i}")?;
    }
    writeln!(out)?;
    for (t, z) in &result.samples {
        write!(out, "{t}")?;
        for c in z {
            write!(out, ",{},{}", c.re, c.im)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat_int, Monomial};
    use crate::vectorfield::standard_generators;

    fn v2() -> VectorField {
        standard_generators(2).1
    }

    #[test]
    fn translation_flow_of_u() {
        let (u, _) = standard_generators(2);
        let req = FlowRequest::from_real_start(u, &[0.0, 0.0], 1.0);
        let res = integrate(&req).unwrap();
        assert!(matches!(res.status, FlowStatus::Reached { .. }));
        let (t, z) = res.final_state();
        assert_eq!(*t, 1.0);
        assert!((z[0].re).abs() < 1e-12 && (z[1].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn v_flow_matches_closed_form_at_short_time() {
        let req = FlowRequest::from_real_start(v2(), &[1.0, 1.0], 0.1);
        let res = integrate(&req).unwrap();
        let (x, y) = v_flow_closed_form(0.1).unwrap();
        let (_, z) = res.final_state();
        assert!((z[0].re - x).abs() / x < 1e-6, "x = {}", z[0].re);
        assert!((z[1].re - y).abs() / y < 1e-6);
        assert!(z[0].im.abs() < 1e-9 && z[1].im.abs() < 1e-9);
    }

    #[test]
    fn v_flow_blows_up_near_one_seventh() {
        let req = FlowRequest::from_real_start(v2(), &[1.0, 1.0], 0.2);
        let res = integrate(&req).unwrap();
        match res.status {
            FlowStatus::BlowUp { t } => assert!((t - 1.0 / 7.0).abs() < 1e-3, "t = {t}"),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn closed_form_endpoints() {
        assert_eq!(v_flow_closed_form(0.0).unwrap(), (1.0, 1.0));
        let (x, _) = v_flow_closed_form(0.1).unwrap();
        assert!((x - 1.1876734).abs() < 1e-6);
        let near_pole = v_flow_closed_form(1.0 / 7.0 - 1e-9).unwrap().0;
        assert!(near_pole > 10.0);
        assert!(v_flow_closed_form(1.0 / 7.0).is_err());
        assert!(v_flow_closed_form(0.2).is_err());
    }

    #[test]
    fn invalid_requests_are_rejected() {
        let (u, _) = standard_generators(2);
        let mut req = FlowRequest::from_real_start(u.clone(), &[0.0], 1.0);
        assert!(matches!(integrate(&req), Err(FlowError::InvalidRequest(_))));
        req = FlowRequest::from_real_start(u.clone(), &[0.0, 0.0], 1.0);
        req.rel_tol = 0.0;
        assert!(matches!(integrate(&req), Err(FlowError::InvalidRequest(_))));
        req = FlowRequest::from_real_start(u, &[f64::NAN, 0.0], 1.0);
        assert!(matches!(integrate(&req), Err(FlowError::InvalidRequest(_))));
    }

    #[test]
    fn nilpotency_of_u() {
        let (u, _) = standard_generators(2);
        match check_locally_nilpotent(&u, 10) {
            NilpotencyVerdict::Nilpotent { bound } => assert_eq!(bound, 2),
            other => panic!("expected nilpotent, got {other:?}"),
        }
    }

    #[test]
    fn scaling_field_is_not_nilpotent() {
        let w = VectorField::single(1, 1, Polynomial::variable(1, 1));
        assert_eq!(
            check_locally_nilpotent(&w, 10),
            NilpotencyVerdict::NotNilpotent { witness: 1 }
        );
    }

    #[test]
    fn v_is_inconclusive() {
        assert_eq!(
            check_locally_nilpotent(&v2(), 25),
            NilpotencyVerdict::Inconclusive
        );
    }

    #[test]
    fn nilpotent_triangular_field() {
        // z2 d1 kills z1 in two steps, z2 in one
        let w = VectorField::single(2, 1, Polynomial::variable(2, 2));
        match check_locally_nilpotent(&w, 10) {
            NilpotencyVerdict::Nilpotent { bound } => assert_eq!(bound, 2),
            other => panic!("expected nilpotent, got {other:?}"),
        }
    }

    #[test]
    fn csv_has_expected_header() {
        let (u, _) = standard_generators(2);
        let req = FlowRequest::from_real_start(u, &[0.5, -0.25], 0.5);
        let res = integrate(&req).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&res, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,re_z1,im_z1,re_z2,im_z2");
        assert_eq!(text.lines().count(), res.samples.len() + 1);
        assert!(text.lines().nth(1).unwrap().starts_with("0,0.5,0,-0.25,0"));
    }

    #[test]
    fn reversing_the_ray_returns_to_start() {
        let req = FlowRequest::from_real_start(v2(), &[1.0, 1.0], 0.1);
        let res = integrate(&req).unwrap();
        let (_, end) = res.final_state().clone();
        let mut back_req = FlowRequest::new(v2(), end, 0.1);
        back_req.theta = std::f64::consts::PI;
        let back = integrate(&back_req).unwrap();
        let (_, z) = back.final_state();
        assert!((z[0].re - 1.0).abs() < 1e-6 && (z[1].re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn nilpotent_bound_is_symbolically_verified() {
        let w = VectorField::single(3, 1, Polynomial::variable(3, 2))
            .add(&VectorField::single(
                3,
                2,
                Polynomial::monomial(Monomial::variable(3, 3), rat_int(5)),
            ));
        if let NilpotencyVerdict::Nilpotent { bound } = check_locally_nilpotent(&w, 10) {
            for i in 1..=3 {
                let mut f = Polynomial::variable(3, i);
                for _ in 0..bound {
                    f = w.apply(&f);
                }
                assert!(f.is_zero());
            }
        } else {
            panic!("expected nilpotent");
        }
    }
}
