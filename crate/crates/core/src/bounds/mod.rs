//! Closed-form capacity lower bounds at a fixed Markov parameter.
//!
//! Each bound has the shape `h(gamma) - sum(penalties) + sum(credits)`.
//! Terms with an independent series representation are summed from their
//! joint laws; printed closed forms are evaluated alongside as diagnostics.

pub mod config;
pub mod insertion;
pub mod intermediates;
pub mod runlaw;
pub mod sterm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{h2, NeumaierSum};
use crate::params::{ChannelParams, EntropyTerm};

pub use config::{SeriesConfig, SERIES_CONFIG_ENV};
pub use insertion::{h_i_limit, h_t_limit, insertion_penalty_credit, printed_t_penalty, stationary_iy, IyDistribution};
pub use intermediates::{markov_q, AnalyticIntermediates};
pub use runlaw::{
    closed_form_hlxly, delins_transition, deletion_transition, duplication_transition, run_law_delins_h,
    run_law_deletion_h, run_law_duplication_h, RunKernel,
};
pub use sterm::{cond_entropy_s_given_yy, closed_form_hs2, delins_s_closed_form, delins_s_term};

/// Smallest Markov parameter at which bounds are evaluated.
pub const GAMMA_MIN: f64 = 1e-6;
/// Largest Markov parameter at which bounds are evaluated.
pub const GAMMA_MAX: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Deletion,
    InsertionLb1,
    InsertionLb2,
    Delins,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Deletion => "deletion",
            BoundKind::InsertionLb1 => "insertion_lb1",
            BoundKind::InsertionLb2 => "insertion_lb2",
            BoundKind::Delins => "delins",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermRole {
    Base,
    Penalty,
    Credit,
}

/// A term together with how it enters the bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTerm {
    pub role: TermRole,
    pub weight: f64,
    pub term: EntropyTerm,
}

impl BoundTerm {
    fn new(role: TermRole, weight: f64, term: EntropyTerm) -> Self {
        Self { role, weight, term }
    }

    /// Signed contribution to the bound.
    pub fn contribution(&self) -> f64 {
        let v = self.weight * self.term.value;
        match self.role {
            TermRole::Penalty => -v,
            TermRole::Base | TermRole::Credit => v,
        }
    }
}

/// A series value next to its printed closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub name: String,
    pub series: f64,
    pub closed_form: f64,
    pub residual: f64,
}

impl Diagnostic {
    fn new(name: &str, series: f64, closed_form: f64) -> Self {
        Self {
            name: name.to_string(),
            series,
            closed_form,
            residual: closed_form - series,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub kind: BoundKind,
    pub params: ChannelParams,
    pub bound_bits: f64,
    pub gamma_star: f64,
    pub terms: Vec<BoundTerm>,
    /// Sum of weighted truncation errors.
    pub error_budget: f64,
    pub diagnostics: Vec<Diagnostic>,
}

impl BoundResult {
    fn assemble(kind: BoundKind, params: ChannelParams, gamma: f64, terms: Vec<BoundTerm>, diagnostics: Vec<Diagnostic>) -> Self {
        let bound_bits = terms.iter().map(BoundTerm::contribution).collect::<NeumaierSum>().value();
        let error_budget = terms.iter().map(|t| t.weight.abs() * t.term.truncation_error).sum();
        Self {
            kind,
            params,
            bound_bits,
            gamma_star: gamma,
            terms,
            error_budget,
            diagnostics,
        }
    }

    /// Recomputes the bound from its terms.
    pub fn reconstruct(&self) -> f64 {
        self.terms.iter().map(BoundTerm::contribution).sum()
    }

    pub fn term(&self, name: &str) -> Option<&BoundTerm> {
        self.terms.iter().find(|t| t.term.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundOptions {
    pub series: SeriesConfig,
    /// Use the printed closed form for the deletion-channel `S` term.
    pub paper_closed_forms: bool,
    /// Evaluate printed closed forms next to the series.
    pub diagnostics: bool,
}

impl BoundOptions {
    pub fn with_series(series: SeriesConfig) -> Self {
        Self {
            series,
            ..Self::default()
        }
    }
}

pub fn check_gamma(gamma: f64) -> Result<()> {
    if (GAMMA_MIN..=GAMMA_MAX).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "gamma",
            value: gamma,
            expected: "[1e-6, 1 - 1e-6]",
        })
    }
}

fn base(gamma: f64) -> BoundTerm {
    BoundTerm::new(TermRole::Base, 1.0, EntropyTerm::exact("h(gamma)", h2(gamma)))
}

fn require_zero(name: &'static str, value: f64, kind: BoundKind) -> Result<()> {
    if value == 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{} bound takes no {name} parameter (got {value})", kind.name())))
    }
}

/// Evaluates one bound at a fixed Markov parameter.
pub fn evaluate_bound(kind: BoundKind, params: &ChannelParams, gamma: f64, opts: &BoundOptions) -> Result<BoundResult> {
    check_gamma(gamma)?;
    let p = ChannelParams::new(params.d, params.i, params.alpha)?;
    let cfg = &opts.series;
    let mut diags = Vec::new();
    let terms = match kind {
        BoundKind::Deletion => {
            require_zero("i", p.i, kind)?;
            let d = p.d;
            let s = cond_entropy_s_given_yy(gamma, d, cfg)?;
            let r = run_law_deletion_h(gamma, d, cfg)?;
            if opts.diagnostics || opts.paper_closed_forms {
                diags.push(Diagnostic::new("H(S2|Y1Y2)", s.value, closed_form_hs2(gamma, d)?));
            }
            if opts.diagnostics {
                diags.push(Diagnostic::new("H(LX|LY')", r.value, closed_form_hlxly(gamma, d)));
            }
            let s = if opts.paper_closed_forms {
                EntropyTerm::exact("H(S2|Y1Y2)[printed]", closed_form_hs2(gamma, d)?)
            } else {
                s
            };
            vec![
                base(gamma),
                BoundTerm::new(TermRole::Penalty, 1.0 - d, s),
                BoundTerm::new(TermRole::Penalty, 1.0 - gamma, r),
            ]
        }
        BoundKind::InsertionLb1 => {
            require_zero("d", p.d, kind)?;
            let (i, a) = (p.i, p.alpha);
            vec![
                base(gamma),
                BoundTerm::new(TermRole::Penalty, 1.0 + i, EntropyTerm::exact("h_I", h_i_limit(i, a, gamma)?)),
                BoundTerm::new(TermRole::Credit, 1.0, EntropyTerm::exact("credit", insertion_penalty_credit(i, a, gamma)?)),
            ]
        }
        BoundKind::InsertionLb2 => {
            require_zero("d", p.d, kind)?;
            let (i, a) = (p.i, p.alpha);
            let ht = h_t_limit(i, a, gamma)?;
            if opts.diagnostics {
                diags.push(Diagnostic::new("(1+i)h_T", (1.0 + i) * ht, printed_t_penalty(i, a, gamma)));
            }
            vec![
                base(gamma),
                BoundTerm::new(TermRole::Penalty, 1.0 + i, EntropyTerm::exact("h_T", ht)),
                BoundTerm::new(TermRole::Penalty, 1.0 - gamma, run_law_duplication_h(gamma, i, cfg)?),
                BoundTerm::new(TermRole::Credit, 1.0, EntropyTerm::exact("credit", insertion_penalty_credit(i, a, gamma)?)),
            ]
        }
        BoundKind::Delins => {
            let (d, i, a) = (p.d, p.i, p.alpha);
            let q = markov_q(gamma, d)?;
            let ip = p.i_prime().min(1.0);
            let ht = EntropyTerm::exact("h_T(i',q)", insertion::h_t_limit(ip, a, q)?);
            let s = delins_s_term(gamma, d, i, a, cfg)?;
            if opts.diagnostics {
                diags.push(Diagnostic::new("H(S|YYT)", s.value, delins_s_closed_form(gamma, d, i, a)?));
                let printed = delins_printed_t_penalty(d, i, a, q);
                diags.push(Diagnostic::new("(1-d+i)h_T(i',q)", (1.0 - d + i) * ht.value, printed));
            }
            vec![
                base(gamma),
                BoundTerm::new(TermRole::Penalty, 1.0 - d + i, ht),
                BoundTerm::new(TermRole::Penalty, 1.0 - d, s),
                BoundTerm::new(TermRole::Penalty, 1.0 - gamma, run_law_delins_h(gamma, d, i, cfg)?),
            ]
        }
    };
    Ok(BoundResult::assemble(kind, p, gamma, terms, diags))
}

/// `(qbar (1-d) + q i abar) h(i abar / (qbar (1-d) + q i abar))`, as printed
/// in the combined-channel bound.
pub fn delins_printed_t_penalty(d: f64, i: f64, alpha: f64, q: f64) -> f64 {
    let c = i * (1.0 - alpha);
    let den = (1.0 - q) * (1.0 - d) + q * c;
    if den <= 0.0 {
        0.0
    } else {
        den * h2(c / den)
    }
}

fn value(kind: BoundKind, params: ChannelParams, gamma: f64, cfg: &SeriesConfig) -> Result<f64> {
    Ok(evaluate_bound(kind, &params, gamma, &BoundOptions::with_series(*cfg))?.bound_bits)
}

pub fn lb1_insertion(i: f64, alpha: f64, gamma: f64) -> Result<f64> {
    value(BoundKind::InsertionLb1, ChannelParams::insertion(i, alpha)?, gamma, &SeriesConfig::default())
}

pub fn lb2_insertion(i: f64, alpha: f64, gamma: f64, cfg: &SeriesConfig) -> Result<f64> {
    value(BoundKind::InsertionLb2, ChannelParams::insertion(i, alpha)?, gamma, cfg)
}

pub fn lb_deletion(d: f64, gamma: f64, cfg: &SeriesConfig) -> Result<f64> {
    value(BoundKind::Deletion, ChannelParams::deletion(d)?, gamma, cfg)
}

pub fn lb_delins(d: f64, i: f64, alpha: f64, gamma: f64, cfg: &SeriesConfig) -> Result<f64> {
    value(BoundKind::Delins, ChannelParams::new(d, i, alpha)?, gamma, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_channel_gives_source_entropy() {
        let cfg = SeriesConfig::default();
        for g in [0.1, 0.5, 0.77] {
            assert_eq!(lb_deletion(0.0, g, &cfg).unwrap(), h2(g));
            assert_eq!(lb1_insertion(0.0, 0.3, g).unwrap(), h2(g));
            assert_eq!(lb2_insertion(0.0, 0.3, g, &cfg).unwrap(), h2(g));
            assert_eq!(lb_delins(0.0, 0.0, 0.3, g, &cfg).unwrap(), h2(g));
        }
    }

    #[test]
    fn terms_reconstruct_bound() {
        let p = ChannelParams::new(0.1, 0.1, 0.8).unwrap();
        let r = evaluate_bound(BoundKind::Delins, &p, 0.6, &BoundOptions::default()).unwrap();
        assert!((r.reconstruct() - r.bound_bits).abs() < 1e-12);
        assert!(r.bound_bits > 0.0 && r.bound_bits < 1.0);
    }

    #[test]
    fn delins_t_term_matches_printed_form() {
        for (g, d, i, a) in [(0.5, 0.1, 0.1, 0.8), (0.3, 0.4, 0.2, 0.1), (0.9, 0.0, 0.5, 0.5)] {
            let q = markov_q(g, d).unwrap();
            let ip = i / (1.0 - d);
            let ours = (1.0 - d + i) * h_t_limit(ip, a, q).unwrap();
            assert!((ours - delins_printed_t_penalty(d, i, a, q)).abs() < 1e-14);
        }
    }

    #[test]
    fn sticky_channel_has_no_t_penalty() {
        let p = ChannelParams::insertion(0.3, 1.0).unwrap();
        let r = evaluate_bound(BoundKind::InsertionLb2, &p, 0.6, &BoundOptions::default()).unwrap();
        assert_eq!(r.term("h_T").unwrap().term.value, 0.0);
        assert_eq!(r.term("credit").unwrap().term.value, 0.0);
        let expected = h2(0.6) - 0.4 * run_law_duplication_h(0.6, 0.3, &SeriesConfig::default()).unwrap().value;
        assert!((r.bound_bits - expected).abs() < 1e-15);
    }

    #[test]
    fn gamma_domain_enforced() {
        let p = ChannelParams::deletion(0.1).unwrap();
        assert!(evaluate_bound(BoundKind::Deletion, &p, 0.0, &BoundOptions::default()).is_err());
        assert!(evaluate_bound(BoundKind::Deletion, &p, 1.0, &BoundOptions::default()).is_err());
        let bad = ChannelParams::new(0.1, 0.1, 0.5).unwrap();
        assert!(evaluate_bound(BoundKind::Deletion, &bad, 0.5, &BoundOptions::default()).is_err());
    }
}
