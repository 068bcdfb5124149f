//! The ordered list of candidate witness relations for a pair `(ρ, σ)`.

use crate::derived::{DerivedSpec, IndexMode, Kind, Source};
use crate::relcore::Relation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub tag: String,
    pub spec: DerivedSpec,
}

fn cand(tag: &str, spec: DerivedSpec) -> Candidate {
    Candidate {
        tag: tag.to_string(),
        spec,
    }
}

fn derived(spec: DerivedSpec) -> Source {
    Source::Derived(Box::new(spec))
}

fn f_size(rho: &Relation) -> usize {
    let outside = rho.k().saturating_sub(rho.center().len());
    let r = rho.arity().saturating_sub(1);
    if r > outside {
        return 0;
    }
    (0..r).fold(1usize, |acc, i| acc * (outside - i) / (i + 1))
}

/// Candidates in proof order, followed by every candidate again with the other index mode.
pub fn catalog(rho: &Relation, sigma: &Relation) -> Vec<Candidate> {
    let k = rho.k();
    let h = rho.arity();
    let s = sigma.arity();
    let mut out = Vec::new();
    let meet = || DerivedSpec::new(Kind::Intersect);

    if s == 1 && h == 2 {
        out.push(cand("unary-tau", DerivedSpec::new(Kind::Tau)));
        for t in 2..=k {
            let g = DerivedSpec::new(Kind::GammaT).param("t", t);
            let r = if t == 2 {
                Source::Rho
            } else {
                derived(DerivedSpec::new(Kind::RhoL).param("l", t))
            };
            out.push(cand(
                "gamma-t-meet-rho-t",
                meet().inputs(vec![derived(g), r]),
            ));
        }
        out.push(cand("gamma-binary", DerivedSpec::new(Kind::GammaBinary)));
        for t in 3..=k {
            out.push(cand(
                "gamma-t",
                DerivedSpec::new(Kind::GammaT).param("t", t),
            ));
        }
    }
    if s == 1 && h >= 3 {
        for n in h - 1..=k.max(h) {
            out.push(cand(
                "alpha-n",
                DerivedSpec::new(Kind::AlphaN).param("n", n),
            ));
        }
        for j in 1..=f_size(rho) {
            out.push(cand(
                "beta-chain",
                DerivedSpec::new(Kind::BetaChain).param("j", j),
            ));
        }
    }
    if s == h {
        out.push(cand("meet", meet()));
        for positions in [h - 1, h] {
            let a1 = DerivedSpec::new(Kind::Alpha1Of).param("positions", positions);
            out.push(cand(
                "alpha1-meet",
                meet().inputs(vec![Source::Rho, derived(a1)]),
            ));
        }
        for t in h..=k {
            out.push(cand("beta-t", DerivedSpec::new(Kind::BetaT).param("t", t)));
        }
        for positions in [h - 1, h] {
            let a1 = DerivedSpec::new(Kind::Alpha1Of).param("positions", positions);
            let gamma = meet().inputs(vec![Source::Rho, derived(a1)]);
            for t in h..=k {
                let bt = DerivedSpec::new(Kind::BetaT)
                    .param("t", t)
                    .inputs(vec![Source::Rho, derived(gamma.clone())]);
                out.push(cand("beta-t-alpha1", bt));
            }
        }
    }
    if 2 <= h && h < s {
        for t in h..s {
            out.push(cand(
                "theta-up",
                DerivedSpec::new(Kind::ThetaUp).param("t", t),
            ));
        }
        out.push(cand("gamma-s", DerivedSpec::new(Kind::GammaS)));
        for t in s..=k.max(s) {
            let spec = DerivedSpec::new(Kind::GammaPrimeT)
                .param("t", t)
                .param("range", s);
            out.push(cand("gamma-prime-t", spec));
        }
        out.push(cand("gamma-prime", DerivedSpec::new(Kind::GammaPrime)));
    }
    if 2 <= s && s < h {
        for t in s..h {
            out.push(cand(
                "theta-down",
                DerivedSpec::new(Kind::ThetaDown).param("t", t),
            ));
        }
        for t in h..=k.max(h) {
            let spec = DerivedSpec::new(Kind::GammaPrimeT)
                .param("t", t)
                .param("range", t);
            out.push(cand("theta-wide", spec));
        }
        out.push(cand("gamma-prime-h", DerivedSpec::new(Kind::GammaPrimeH)));
        for n in 1..=f_size(rho) {
            out.push(cand(
                "gamma-prime-chain",
                DerivedSpec::new(Kind::GammaPrimeChain).param("n", n),
            ));
        }
    }

    let alt: Vec<Candidate> = out
        .iter()
        .map(|c| Candidate {
            tag: format!("{}-alt-mode", c.tag),
            spec: flip_modes(&c.spec),
        })
        .collect();
    out.extend(alt);
    out
}

fn flip_modes(spec: &DerivedSpec) -> DerivedSpec {
    let mut s = spec.clone();
    s.index_mode = match s.index_mode {
        IndexMode::Strict => IndexMode::Repeats,
        IndexMode::Repeats => IndexMode::Strict,
    };
    for input in &mut s.inputs {
        if let Source::Derived(d) = input {
            **d = flip_modes(d);
        }
    }
    s
}
