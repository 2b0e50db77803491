//! Scattered sets and basic local sentences.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::structure::{gaifman_graph, induced_substructure, Elem, ElemSet, Structure};

use super::ast::{fresh_name, Formula, Term};
use super::eval::Prepared;

/// Whether `x` has exactly `ell` elements, pairwise at Gaifman distance `> 2r`.
pub fn is_scattered(a: &Structure, x: &ElemSet, ell: usize, r: u32) -> Result<bool> {
    if let Some(&bad) = x.iter().find(|e| !a.contains(**e)) {
        return Err(Error::NotInUniverse(bad));
    }
    if x.len() != ell {
        return Ok(false);
    }
    let g = gaifman_graph(a);
    let idx: Vec<usize> = x.iter().map(|&e| g.index_of(e).expect("in universe")).collect();
    for (i, &u) in idx.iter().enumerate() {
        let d = g.bfs(u);
        if idx[i + 1..].iter().any(|&v| d[v] <= 2 * r as usize) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `∃x₁…x_ℓ (⋀ d(xᵢ,xⱼ) > 2r ∧ ⋀ xᵢ ∈ R ∧ ⋀ ψ^(r)(xᵢ))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicLocalSentence {
    pub ell: usize,
    pub r: u32,
    /// The free variable of `psi`.
    pub var: String,
    pub psi: Formula,
    /// Unary predicate restricting the scattered points, if any.
    pub annotation: Option<String>,
}

impl BasicLocalSentence {
    pub fn new(ell: usize, r: u32, var: &str, psi: Formula) -> Result<Self> {
        if ell == 0 || r == 0 {
            return Err(Error::Invalid("basic local sentences need ℓ ≥ 1 and r ≥ 1".into()));
        }
        let (fo, so) = psi.free_variables();
        if !so.is_empty() || fo.iter().any(|v| v != var) {
            return Err(Error::Invalid(format!("ψ may only have `{var}` free")));
        }
        Ok(BasicLocalSentence {
            ell,
            r,
            var: var.to_string(),
            psi,
            annotation: None,
        })
    }

    pub fn annotated(mut self, name: &str) -> Self {
        self.annotation = Some(name.to_string());
        self
    }

    /// The equivalent plain sentence, with `ψ` relativized to `r`-balls.
    pub fn to_formula(&self) -> Formula {
        let taken: BTreeSet<String> = self.psi.variable_names();
        let mut vars = Vec::new();
        let mut all = taken.clone();
        for i in 1..=self.ell {
            let v = fresh_name(&format!("x{i}"), &all);
            all.insert(v.clone());
            vars.push(v);
        }
        let mut parts = Vec::new();
        for i in 0..vars.len() {
            for j in i + 1..vars.len() {
                parts.push(Formula::not(Formula::DistLeq(
                    Term::var(&vars[i]),
                    Term::var(&vars[j]),
                    2 * self.r,
                )));
            }
        }
        for v in &vars {
            if let Some(ann) = &self.annotation {
                parts.push(Formula::Rel(ann.clone(), vec![Term::var(v)]));
            }
            let local = self.psi.relativize(&self.var, self.r);
            parts.push(local.rename_free(&self.var, v));
        }
        vars.iter()
            .rev()
            .fold(Formula::and(parts), |f, v| Formula::Exists(v.clone(), Box::new(f)))
    }
}

/// Exhaustive search for an `(ℓ, r)`-scattered subset of `candidates` (the whole
/// universe when `None`) whose members satisfy `ψ` inside their `r`-ball.
pub fn evaluate_basic_local(a: &Structure, candidates: Option<&ElemSet>, b: &BasicLocalSentence) -> Result<bool> {
    if let Some(set) = candidates {
        if let Some(&bad) = set.iter().find(|e| !a.contains(**e)) {
            return Err(Error::NotInUniverse(bad));
        }
    }
    let g = gaifman_graph(a);
    let pool: Vec<Elem> = match candidates {
        Some(s) => s.iter().copied().collect(),
        None => a.universe().iter().copied().collect(),
    };
    let mut good = Vec::new();
    for &e in &pool {
        let v = g.index_of(e).expect("in universe");
        let d = g.bfs(v);
        let ball: ElemSet = (0..g.n())
            .filter(|&u| d[u] <= b.r as usize)
            .map(|u| g.label(u))
            .collect();
        let local = induced_substructure(a, &ball)?;
        if Prepared::new(&local, &b.psi, &[&b.var])?.check(&[e])? {
            good.push(v);
        }
    }
    let dist: Vec<Vec<usize>> = good.iter().map(|&v| g.bfs(v)).collect();
    let far = |i: usize, j: usize| dist[i][good[j]] > 2 * b.r as usize;
    let mut chosen = Vec::new();
    Ok(pick(&mut chosen, 0, b.ell, good.len(), &far))
}

fn pick(chosen: &mut Vec<usize>, from: usize, ell: usize, n: usize, far: &dyn Fn(usize, usize) -> bool) -> bool {
    if chosen.len() == ell {
        return true;
    }
    for i in from..n {
        if chosen.iter().all(|&j| far(j, i)) {
            chosen.push(i);
            if pick(chosen, i + 1, ell, n, far) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}
