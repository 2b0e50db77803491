use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::logic::{holds, parse_formula, Formula};
use crate::minors::{excl_membership, ObstructionSet};
use crate::transforms::{torso, torso_plus};
use crate::width::{treedepth_exact, treewidth};

use super::{model_check_theta_with, ThetaSentence};

/// Default vertex cap for the measures below.
pub const MEASURE_CAP: usize = 12;

/// How the torso of a modulator is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parameter {
    /// `|X|`.
    Size,
    Treedepth,
    Treewidth,
    /// Tree-depth read through the recursive elimination semantics, i.e. the
    /// elimination distance itself.
    RecursiveTreedepth,
}

/// A graph class, given by a sentence or by a first-order formula with
/// optional excluded minors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Sentence(ThetaSentence),
    Class {
        sigma: Formula,
        obstructions: Option<ObstructionSet>,
    },
}

impl Target {
    pub fn all() -> Target {
        Target::Class {
            sigma: Formula::True,
            obstructions: None,
        }
    }

    pub fn edgeless() -> Target {
        Target::Class {
            sigma: parse_formula("forall x. forall y. not E(x,y)").expect("fixed formula"),
            obstructions: None,
        }
    }

    /// `excl{K3}`.
    pub fn forests() -> Target {
        Target::excluding(ObstructionSet::from_names(&["K3"]).expect("fixed name"))
    }

    pub fn excluding(obstructions: ObstructionSet) -> Target {
        Target::Class {
            sigma: Formula::True,
            obstructions: Some(obstructions),
        }
    }

    pub fn contains(&self, g: &Graph) -> Result<bool> {
        match self {
            Target::Sentence(t) => Ok(model_check_theta_with(&g.to_structure(), t, g.n())?.is_some()),
            Target::Class { sigma, obstructions } => {
                if !holds(&g.to_structure(), sigma)? {
                    return Ok(false);
                }
                match obstructions {
                    Some(o) => excl_membership(g, o),
                    None => Ok(true),
                }
            }
        }
    }
}

/// An optimal value with a modulator (vertex indices) attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measured {
    pub value: usize,
    pub modulator: VertexSet,
}

/// `min p(torso(G, X))` over `X` with `G ∖ X` in the target; `None` when no
/// `X` qualifies. Ties go to the modulator with the smallest bitmask.
pub fn parametric_measure(g: &Graph, p: Parameter, target: &Target, cap: usize) -> Result<Option<Measured>> {
    let mut o = Oracle::new(g, target, cap)?;
    if p == Parameter::RecursiveTreedepth {
        return Ok(o.elimination(o.full)?.map(|(value, removed)| Measured {
            value,
            modulator: o.set(removed),
        }));
    }
    let mut best: Option<Measured> = None;
    for x in 0..=o.full {
        if !o.member(o.full & !x)? {
            continue;
        }
        let xs = o.set(x);
        let value = match p {
            Parameter::Size => xs.len(),
            Parameter::Treedepth => treedepth_exact(&torso(g, &xs)?)?,
            Parameter::Treewidth => treewidth(&torso(g, &xs)?)?,
            Parameter::RecursiveTreedepth => unreachable!("handled above"),
        };
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(Measured { value, modulator: xs });
        }
    }
    Ok(best)
}

/// Elimination distance: `0` on the target, otherwise one more than the
/// distance reached after deleting one vertex from every component outside
/// the target and recursing on the components left.
pub fn elimination_distance(g: &Graph, target: &Target, cap: usize) -> Result<Option<usize>> {
    let mut o = Oracle::new(g, target, cap)?;
    Ok(o.elimination(o.full)?.map(|(v, _)| v))
}

/// As [`elimination_distance`] but a level deletes any `X` whose `torso⁺` is
/// acyclic.
pub fn bridge_depth(g: &Graph, target: &Target, cap: usize) -> Result<Option<usize>> {
    let mut o = Oracle::new(g, target, cap)?;
    Ok(o.bridge(o.full)?.map(|(v, _)| v))
}

/// `min tw(torso(G, X))` over `X` with `G ∖ X` in the target.
pub fn g_treewidth(g: &Graph, target: &Target, cap: usize) -> Result<Option<Measured>> {
    parametric_measure(g, Parameter::Treewidth, target, cap)
}

type Level = Option<(usize, u64)>;

struct Oracle<'a> {
    g: &'a Graph,
    adj: Vec<u64>,
    full: u64,
    target: &'a Target,
    members: HashMap<u64, bool>,
    elim: HashMap<u64, Level>,
    bridge: HashMap<u64, Level>,
}

impl<'a> Oracle<'a> {
    fn new(g: &'a Graph, target: &'a Target, cap: usize) -> Result<Self> {
        let limit = cap.min(63);
        if g.n() > limit {
            return Err(Error::LimitExceeded {
                what: "graph for modulator measures",
                size: g.n(),
                limit,
            });
        }
        Ok(Oracle {
            g,
            adj: g.masks(),
            full: (1u64 << g.n()) - 1,
            target,
            members: HashMap::new(),
            elim: HashMap::new(),
            bridge: HashMap::new(),
        })
    }

    fn set(&self, mask: u64) -> VertexSet {
        (0..self.g.n()).filter(|v| mask >> v & 1 == 1).collect()
    }

    fn member(&mut self, mask: u64) -> Result<bool> {
        if let Some(&m) = self.members.get(&mask) {
            return Ok(m);
        }
        let m = self.target.contains(&self.g.induced(&self.set(mask)))?;
        self.members.insert(mask, m);
        Ok(m)
    }

    fn components(&self, mask: u64) -> Vec<u64> {
        let mut left = mask;
        let mut out = Vec::new();
        while left != 0 {
            let mut comp = left & left.wrapping_neg();
            let mut frontier = comp;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let new = self.adj[v] & mask & !comp;
                comp |= new;
                frontier |= new;
            }
            out.push(comp);
            left &= !comp;
        }
        out
    }

    /// Worst level over the components of `mask`, with everything removed.
    fn worst(&mut self, mask: u64, step: fn(&mut Self, u64) -> Result<Level>) -> Result<Level> {
        let mut value = 0;
        let mut removed = 0;
        for c in self.components(mask) {
            match step(self, c)? {
                Some((v, r)) => {
                    value = value.max(v);
                    removed |= r;
                }
                None => return Ok(None),
            }
        }
        Ok(Some((value, removed)))
    }

    fn elimination(&mut self, mask: u64) -> Result<Level> {
        if let Some(&l) = self.elim.get(&mask) {
            return Ok(l);
        }
        let l = if self.member(mask)? {
            Some((0, 0))
        } else {
            self.worst(mask, Self::elimination_step)?.map(|(v, r)| (v + 1, r))
        };
        self.elim.insert(mask, l);
        Ok(l)
    }

    /// Level needed by one component below the current deletion: `0` when it
    /// is in the target, otherwise the best single deletion.
    fn elimination_step(&mut self, c: u64) -> Result<Level> {
        if self.member(c)? {
            return Ok(Some((0, 0)));
        }
        let mut best: Level = None;
        let mut vs = c;
        while vs != 0 {
            let v = vs.trailing_zeros() as usize;
            vs &= vs - 1;
            let rest = c & !(1 << v);
            if let Some((value, removed)) = self.worst(rest, Self::elimination)? {
                if best.is_none_or(|(b, _)| value < b) {
                    best = Some((value, removed | 1 << v));
                }
            }
        }
        Ok(best)
    }

    fn bridge(&mut self, mask: u64) -> Result<Level> {
        if let Some(&l) = self.bridge.get(&mask) {
            return Ok(l);
        }
        let l = if self.member(mask)? {
            Some((0, 0))
        } else {
            let order: Vec<usize> = self.set(mask).into_iter().collect();
            let local = self.g.induced(&order.iter().copied().collect());
            let connected = self.components(mask).len() == 1;
            let mut best: Level = None;
            let mut x = mask;
            loop {
                // Submasks of `mask`, descending, ending with the empty set.
                if x != 0 || !connected {
                    let xs: VertexSet = (0..order.len()).filter(|&i| x >> order[i] & 1 == 1).collect();
                    if torso_plus(&local, &xs)?.is_acyclic() {
                        if let Some((v, r)) = self.worst(mask & !x, Self::bridge)? {
                            if best.is_none_or(|(b, _)| v + 1 < b) {
                                best = Some((v + 1, r | x));
                            }
                        }
                    }
                }
                if x == 0 {
                    break;
                }
                x = (x - 1) & mask;
            }
            best
        };
        self.bridge.insert(mask, l);
        Ok(l)
    }
}
