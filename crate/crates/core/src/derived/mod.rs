//! Relations definable from a pair `(ρ, σ)`, each with a transcript that recomputes it.
//!
//! Every constructor is a literal evaluation of its defining formula: the outer loop runs over
//! all candidate tuples in rank order, the inner loop searches a witness `u`/`v` in ascending
//! order. Quantifiers over index selections use either strictly increasing selections or
//! arbitrary selections with repeats, per [`IndexMode`].

mod eval;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relcore::Relation;

pub use eval::{index_selections, max_chain_size};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    /// `{y : ∃u∈σ, (u,y)∈ρ}`; binary `ρ`, unary `σ`.
    Tau,
    /// `{(a,b) : ∃u∈σ, (a,u),(b,u)∈ρ}`.
    GammaBinary,
    /// `{(a_1..a_t) : ∃u∈σ, every (a_i,u)∈ρ}`, `2 ≤ t ≤ k`.
    GammaT,
    /// `{(a_1..a_l) : {a_1..a_l}² ⊆ ρ}`.
    RhoL,
    /// `{b ∈ E^n : ∃u∈σ ∀ (h-1)-selections i, (u, b_i)∈ρ}`, `h ≥ 3`.
    AlphaN,
    /// `(j(h-1)+1)`-ary: one `u∈σ` with `(u, block_i)∈ρ` for each block of `h-1` coordinates after the first.
    BetaChain,
    /// `{x : ∃u ∀ substituted positions i, x[i:=u] ∈ α}`.
    Alpha1Of,
    /// `t`-ary: `∃u ∀ (h-1)-subsets i, (x_{i_1..i_{h-2}}, x_1, u)∈γ ∧ (x_{i_1..i_{h-1}}, u)∈ρ`.
    BetaT,
    /// `s`-ary padding of `ρ`: `{a : (a_1..a_h)∈ρ}`.
    Lambda,
    /// `λ ∩ σ`.
    GammaPrime,
    /// `t`-ary, `h ≤ t < s`: `∃u`, every `(h-1)`-selection plus `u` in `ρ`, and `(a, u^{s-t})∈σ`.
    ThetaUp,
    /// `t`-ary, `s ≤ t < h`: `∃u`, every `(s-1)`-selection plus `u` in `σ`, and `(a, u^{h-t})∈ρ`.
    ThetaDown,
    /// `{x∈σ : ∀ (h-1)-selections i, (x_1, x_i)∈ρ ∧ (x_2, x_i)∈ρ}`.
    GammaS,
    /// `t`-ary: `∃v ∀ (max(h,s)-1)-selections i from a fixed range,
    /// (x_{i_1..i_{h-1}}, v)∈ρ ∧ (x_{i_1..i_{s-1}}, v)∈σ`.
    GammaPrimeT,
    /// `h`-ary, `s < h`: `∃v, (b_2..b_h, v)∈ρ ∧ ∀ (s-1)-selections i, (b_i, v)∈σ`.
    GammaPrimeH,
    /// `(n(h-1)+1)`-ary, `s < h`: `∃v`, every block of `h-1` coordinates after the first plus `v`
    /// in `ρ`, every `(s-1)`-selection plus `v` in `σ`.
    GammaPrimeChain,
    Intersect,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Tau => "tau",
            Kind::GammaBinary => "gamma_binary",
            Kind::GammaT => "gamma_t",
            Kind::RhoL => "rho_l",
            Kind::AlphaN => "alpha_n",
            Kind::BetaChain => "beta_chain",
            Kind::Alpha1Of => "alpha1_of",
            Kind::BetaT => "beta_t",
            Kind::Lambda => "lambda",
            Kind::GammaPrime => "gamma_prime",
            Kind::ThetaUp => "theta_up",
            Kind::ThetaDown => "theta_down",
            Kind::GammaS => "gamma_s",
            Kind::GammaPrimeT => "gamma_prime_t",
            Kind::GammaPrimeH => "gamma_prime_h",
            Kind::GammaPrimeChain => "gamma_prime_chain",
            Kind::Intersect => "intersect",
        }
    }

    pub fn all() -> [Kind; 17] {
        use Kind::*;
        [
            Tau,
            GammaBinary,
            GammaT,
            RhoL,
            AlphaN,
            BetaChain,
            Alpha1Of,
            BetaT,
            Lambda,
            GammaPrime,
            ThetaUp,
            ThetaDown,
            GammaS,
            GammaPrimeT,
            GammaPrimeH,
            GammaPrimeChain,
            Intersect,
        ]
    }

    pub fn from_name(s: &str) -> Option<Kind> {
        Kind::all().into_iter().find(|k| k.name() == s)
    }

    /// The selection style of the defining formula.
    pub fn default_mode(self) -> IndexMode {
        match self {
            Kind::AlphaN | Kind::BetaT | Kind::ThetaUp => IndexMode::Strict,
            _ => IndexMode::Repeats,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How a quantifier over `L` indices drawn from `1..=R` is expanded.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexMode {
    /// Strictly increasing selections `i_1 < .. < i_L`.
    Strict,
    /// All `R^L` selections, repeats allowed.
    Repeats,
}

impl IndexMode {
    pub fn other(self) -> IndexMode {
        match self {
            IndexMode::Strict => IndexMode::Repeats,
            IndexMode::Repeats => IndexMode::Strict,
        }
    }
}

/// Where an input relation of a derivation comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Rho,
    Sigma,
    Derived(Box<DerivedSpec>),
}

/// A derivation transcript: enough to recompute the relation from `(ρ, σ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedSpec {
    pub kind: Kind,
    pub params: BTreeMap<String, usize>,
    pub inputs: Vec<Source>,
    pub index_mode: IndexMode,
    /// Witnesses are searched in this order; always `"ascending"`.
    pub witness_order: String,
}

impl DerivedSpec {
    /// A spec over `(ρ, σ)` with the kind's default index mode.
    pub fn new(kind: Kind) -> Self {
        let inputs = match kind {
            Kind::RhoL | Kind::Lambda => vec![Source::Rho],
            Kind::Alpha1Of => vec![Source::Derived(Box::new(DerivedSpec::new(Kind::Intersect)))],
            Kind::BetaT => {
                vec![
                    Source::Rho,
                    Source::Derived(Box::new(DerivedSpec::new(Kind::Intersect))),
                ]
            }
            _ => vec![Source::Rho, Source::Sigma],
        };
        DerivedSpec {
            kind,
            params: BTreeMap::new(),
            inputs,
            index_mode: kind.default_mode(),
            witness_order: "ascending".into(),
        }
    }

    pub fn param(mut self, name: &str, v: usize) -> Self {
        self.params.insert(name.into(), v);
        self
    }

    pub fn mode(mut self, m: IndexMode) -> Self {
        self.index_mode = m;
        self
    }

    pub fn inputs(mut self, inputs: Vec<Source>) -> Self {
        self.inputs = inputs;
        self
    }

    pub fn get(&self, name: &str) -> Result<usize> {
        self.params
            .get(name)
            .copied()
            .ok_or_else(|| Error::arg(format!("{} needs parameter `{name}`", self.kind)))
    }

    /// Recomputes the relation from `(ρ, σ)`.
    pub fn evaluate(&self, rho: &Relation, sigma: &Relation) -> Result<Relation> {
        let ins = self
            .inputs
            .iter()
            .map(|s| match s {
                Source::Rho => Ok(rho.clone()),
                Source::Sigma => Ok(sigma.clone()),
                Source::Derived(d) => d.evaluate(rho, sigma),
            })
            .collect::<Result<Vec<_>>>()?;
        eval::evaluate(self, &ins)
    }

    /// One-line transcript such as `gamma_t(rho, sigma; t=3; mode=repeats; witness=ascending)`.
    pub fn transcript(&self) -> String {
        let ins: Vec<String> = self
            .inputs
            .iter()
            .map(|s| match s {
                Source::Rho => "rho".to_string(),
                Source::Sigma => "sigma".to_string(),
                Source::Derived(d) => d.transcript(),
            })
            .collect();
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        let mode = match self.index_mode {
            IndexMode::Strict => "strict",
            IndexMode::Repeats => "repeats",
        };
        let mut out = format!("{}({}", self.kind, ins.join(", "));
        if !params.is_empty() {
            out.push_str("; ");
            out.push_str(&params.join(", "));
        }
        out.push_str(&format!("; mode={mode}; witness={})", self.witness_order));
        out
    }
}

/// A derived relation together with its transcript.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derived {
    pub relation: Relation,
    pub spec: DerivedSpec,
}

fn build(spec: DerivedSpec, rho: &Relation, sigma: &Relation) -> Result<Derived> {
    let relation = spec.evaluate(rho, sigma)?;
    Ok(Derived { relation, spec })
}

pub fn tau(rho: &Relation, sigma: &Relation) -> Result<Derived> {
    build(DerivedSpec::new(Kind::Tau), rho, sigma)
}

pub fn gamma_binary(rho: &Relation, sigma: &Relation) -> Result<Derived> {
    build(DerivedSpec::new(Kind::GammaBinary), rho, sigma)
}

pub fn gamma_t(rho: &Relation, sigma: &Relation, t: usize) -> Result<Derived> {
    build(DerivedSpec::new(Kind::GammaT).param("t", t), rho, sigma)
}

pub fn rho_l(rho: &Relation, l: usize) -> Result<Derived> {
    build(DerivedSpec::new(Kind::RhoL).param("l", l), rho, rho)
}

pub fn alpha_n(rho: &Relation, sigma: &Relation, n: usize) -> Result<Derived> {
    build(DerivedSpec::new(Kind::AlphaN).param("n", n), rho, sigma)
}

pub fn beta_chain(rho: &Relation, sigma: &Relation, j: usize) -> Result<Derived> {
    build(DerivedSpec::new(Kind::BetaChain).param("j", j), rho, sigma)
}

/// Substitutes positions `1..h-1` only; [`alpha1_of_all_positions`] substitutes all `h`.
pub fn alpha1_of(alpha: &Relation) -> Result<Derived> {
    let spec = DerivedSpec::new(Kind::Alpha1Of)
        .inputs(vec![Source::Rho])
        .param("positions", alpha.arity() - 1);
    build(spec, alpha, alpha)
}

pub fn alpha1_of_all_positions(alpha: &Relation) -> Result<Derived> {
    let spec = DerivedSpec::new(Kind::Alpha1Of)
        .inputs(vec![Source::Rho])
        .param("positions", alpha.arity());
    build(spec, alpha, alpha)
}

/// `β_t` with `γ` passed explicitly as the second relation.
pub fn beta_t(rho: &Relation, gamma: &Relation, t: usize) -> Result<Derived> {
    let spec = DerivedSpec::new(Kind::BetaT)
        .inputs(vec![Source::Rho, Source::Sigma])
        .param("t", t);
    build(spec, rho, gamma)
}

pub fn lambda_pad(rho: &Relation, s: usize) -> Result<Derived> {
    build(DerivedSpec::new(Kind::Lambda).param("s", s), rho, rho)
}

pub fn gamma_prime(rho: &Relation, sigma: &Relation) -> Result<Derived> {
    build(DerivedSpec::new(Kind::GammaPrime), rho, sigma)
}

pub fn theta_up(rho: &Relation, sigma: &Relation, t: usize) -> Result<Derived> {
    build(DerivedSpec::new(Kind::ThetaUp).param("t", t), rho, sigma)
}

pub fn theta_down(rho: &Relation, sigma: &Relation, t: usize) -> Result<Derived> {
    build(DerivedSpec::new(Kind::ThetaDown).param("t", t), rho, sigma)
}

pub fn gamma_s_rel(rho: &Relation, sigma: &Relation) -> Result<Derived> {
    build(DerivedSpec::new(Kind::GammaS), rho, sigma)
}

/// Index range defaults to `s` when `h < s` and to `t` when `s < h`.
pub fn gamma_prime_t(rho: &Relation, sigma: &Relation, t: usize) -> Result<Derived> {
    let range = if rho.arity() < sigma.arity() {
        sigma.arity()
    } else {
        t
    };
    gamma_prime_t_range(rho, sigma, t, range)
}

pub fn gamma_prime_t_range(
    rho: &Relation,
    sigma: &Relation,
    t: usize,
    range: usize,
) -> Result<Derived> {
    build(
        DerivedSpec::new(Kind::GammaPrimeT)
            .param("t", t)
            .param("range", range),
        rho,
        sigma,
    )
}

pub fn gamma_prime_h(rho: &Relation, sigma: &Relation) -> Result<Derived> {
    build(DerivedSpec::new(Kind::GammaPrimeH), rho, sigma)
}

pub fn gamma_prime_chain(rho: &Relation, sigma: &Relation, n: usize) -> Result<Derived> {
    build(
        DerivedSpec::new(Kind::GammaPrimeChain).param("n", n),
        rho,
        sigma,
    )
}

pub fn intersect(rho: &Relation, sigma: &Relation) -> Result<Derived> {
    build(DerivedSpec::new(Kind::Intersect), rho, sigma)
}
