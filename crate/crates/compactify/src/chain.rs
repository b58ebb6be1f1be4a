//! The ascending chain used by `chain-demo` and the inverse-limit criterion.
//!
//! Level 0 is the two-point family `{tanh}`; level `n` appends
//! `cos(√p_n · x)` for the `n`-th prime. The frequencies are pairwise
//! rationally independent, so every step adds a genuinely new coordinate and
//! each bond simply forgets it.

use compactify_core::{
    build_compactification, compare, BuildParams, Comparison, ComparisonWitness,
    FunctionDescriptor, FunctionFamily, InverseSystem, Result,
};
use serde::{Deserialize, Serialize};

pub fn primes(count: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    let mut n = 2u64;
    while out.len() < count {
        if out.iter().take_while(|p| *p * *p <= n).all(|p| n % p != 0) {
            out.push(n);
        }
        n += 1;
    }
    out
}

pub fn chain_families(levels: usize) -> Vec<FunctionFamily> {
    let mut functions = vec![FunctionDescriptor::tanh(1.0, 0.0)];
    let mut families = Vec::with_capacity(levels);
    let mut frequencies = primes(levels.saturating_sub(1)).into_iter();
    for _ in 0..levels {
        families.push(FunctionFamily::new(functions.clone()).expect("tanh leads the family"));
        if let Some(p) = frequencies.next() {
            functions.push(FunctionDescriptor::cos((p as f64).sqrt(), 0.0));
        }
    }
    families
}

pub fn build_chain(levels: usize, params: BuildParams) -> Result<InverseSystem> {
    let models = chain_families(levels)
        .into_iter()
        .map(|f| build_compactification(f, params))
        .collect::<Result<Vec<_>>>()?;
    InverseSystem::new(models)
}

/// Result of comparing the chain limit with one level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domination {
    pub level: usize,
    pub witness: Option<ComparisonWitness>,
    pub reason: Option<String>,
}

pub fn dominations(
    system: &InverseSystem,
    limit: &compactify_core::CompactificationModel,
) -> Vec<Domination> {
    system
        .levels()
        .iter()
        .enumerate()
        .map(|(level, m)| match compare(limit, m) {
            Comparison::Witness(w) => Domination {
                level,
                witness: Some(w),
                reason: None,
            },
            Comparison::Incomparable(why) => Domination {
                level,
                witness: None,
                reason: Some(why.to_string()),
            },
        })
        .collect()
}
