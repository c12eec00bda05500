//! The exact phase picked up by the section action on the lifted coset
//! cocycle for quotients of SU(n) by a central Z_p, the parity rule it
//! must match, and the induced obstruction table over Z_p.

use cocycle_core::abelian::AbelianGroup;
use cocycle_core::crossed::{carry_cocycle, obstruction_from_liftdata, PhaseLiftData};
use cocycle_core::error::CoreError;
use cocycle_core::group::FiniteGroup;
use num_rational::Ratio;
use std::sync::Arc;

/// The exact action phase and its sign for SU(n)/Z_p at level k:
/// e^{ikπ·n(n−1)/p} as the rational k·n(n−1)/(2p) mod 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuQuotientPhase {
    pub n: u32,
    pub p: u32,
    pub k: u32,
    /// phase in Q/Z, reduced to [0, 1)
    pub phase: Ratio<i64>,
    /// +1 when the phase is integral, −1 otherwise
    pub sign: i32,
}

pub fn su_quotient_phase(n: u32, p: u32, k: u32) -> Result<SuQuotientPhase, CoreError> {
    if p == 0 || n == 0 || k == 0 {
        return Err(CoreError::Invalid("n, p, k must be positive".into()));
    }
    if n % p != 0 {
        return Err(CoreError::Invalid(format!("p = {p} must divide n = {n}")));
    }
    let raw = Ratio::new((k as i64) * (n as i64) * (n as i64 - 1), 2 * p as i64);
    let phase = raw - raw.floor();
    let sign = if phase == Ratio::new(0, 1) { 1 } else { -1 };
    Ok(SuQuotientPhase { n, p, k, phase, sign })
}

/// The parity rule: the phase is +1 exactly when n is odd or n/p is even.
pub fn parity_rule_sign(n: u32, p: u32) -> i32 {
    if n % 2 == 1 || (n / p) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The full obstruction data over X = Z_p: lifts are powers of a single
/// central contractible loop, so the action phase on ĉ(y, z) is the carry
/// exponent β(y, z) times the accumulated phase x·(k n(n−1)/2p).
pub fn su_quotient_liftdata(q: &SuQuotientPhase) -> PhaseLiftData {
    let p = q.p as usize;
    let den = *q.phase.denom();
    let coeff = if den <= 1 {
        AbelianGroup::trivial()
    } else {
        AbelianGroup::cyclic(den as i128)
    };
    let to_coeff = |r: Ratio<i64>| -> Vec<i128> {
        if den <= 1 {
            return vec![];
        }
        let scaled = r * Ratio::new(den, 1);
        debug_assert!(scaled.is_integer());
        vec![(scaled.to_integer() as i128).rem_euclid(den as i128)]
    };
    let x = Arc::new(FiniteGroup::cyclic(p));
    let beta = carry_cocycle(p);
    let chat_phase = vec![coeff.zero(); p * p];
    let mut act_phase = vec![coeff.zero(); p * p * p];
    for xx in 0..p {
        for y in 0..p {
            for z in 0..p {
                let r = q.phase * Ratio::new(xx as i64, 1) * Ratio::new(beta[y * p + z] as i64, 1);
                let r = r - r.floor();
                act_phase[xx * p * p + y * p + z] = coeff.canon(to_coeff(r));
            }
        }
    }
    PhaseLiftData { x, coeff, c_label: beta, chat_phase, act_phase }
}

/// End-to-end report: phase, sign, and whether the induced Ω is a nonzero
/// class over the coefficient truncation.
pub struct SuQuotientReport {
    pub phase: SuQuotientPhase,
    pub omega_value_at_generators: Ratio<i64>,
    pub omega_nontrivial: bool,
}

pub fn su_quotient_report(n: u32, p: u32, k: u32) -> Result<SuQuotientReport, CoreError> {
    let phase = su_quotient_phase(n, p, k)?;
    if phase.sign == 1 && *phase.phase.denom() == 1 {
        return Ok(SuQuotientReport {
            phase,
            omega_value_at_generators: Ratio::new(0, 1),
            omega_nontrivial: false,
        });
    }
    let ld = su_quotient_liftdata(&phase);
    let report = obstruction_from_liftdata(&ld)?;
    let den = *phase.phase.denom();
    let omega_value = if p >= 2 {
        let v = report.omega.value(&[1, 1, 1]);
        if v.is_empty() {
            Ratio::new(0, 1)
        } else {
            Ratio::new(v[0] as i64, den)
        }
    } else {
        Ratio::new(0, 1)
    };
    Ok(SuQuotientReport {
        phase,
        omega_value_at_generators: omega_value,
        omega_nontrivial: !report.class_zero,
    })
}
