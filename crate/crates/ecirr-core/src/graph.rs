//! The functional graph of a rational map on P^1(F_q): every vertex has
//! exactly one outgoing edge, so each weakly connected component is one
//! cycle with trees hanging off the cycle vertices.
//!
//! The interesting statistic is the shape of the trees rooted at cycle
//! vertices lying in P^1 of a subfield: for the graphs induced by an
//! endomorphism map over the right quadratic extension, those trees all
//! have one common depth, with every leaf at full height, and that depth
//! equals the valuation computed in the quadratic order. `tree_profiles`
//! measures the trees; the theorem-level assertions live in tests, so a
//! failed expectation shows up as data rather than a crash here.
//!
//! Vertices are indexed 0..q by enumeration order with infinity at q.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::ff::FieldCtx;
use crate::ratmap::{ProjPoint, RationalMap};

/// Successor structure of a map on P^1(F_q), with cycle markings and a
/// compressed predecessor index.
pub struct FunctionalGraph {
    ctx: Arc<FieldCtx>,
    map: RationalMap,
    succ: Vec<u32>,
    on_cycle: Vec<bool>,
    pred_start: Vec<u32>,
    pred_flat: Vec<u32>,
}

/// Shape of one tree hanging off a cycle vertex.
#[derive(Clone, Debug)]
pub struct TreeProfile {
    /// Vertex index of the cycle vertex the tree is rooted at.
    pub root: usize,
    /// Whether the root lies in P^1 of the requested subfield.
    pub root_in_subfield: bool,
    /// Number of non-cycle vertices in the tree (the root not included).
    pub size: usize,
    /// Maximum height over tree vertices; 0 for an empty tree.
    pub depth: u32,
    /// Every leaf sits at height exactly `depth` (vacuously true when the
    /// tree is empty).
    pub leaves_at_full_depth: bool,
}

/// Tree survey of a functional graph relative to a subfield.
#[derive(Clone, Debug)]
pub struct TreeProfileReport {
    pub subfield_deg: u32,
    pub cycle_count: usize,
    pub cycle_lengths: Vec<usize>,
    /// Trees rooted at subfield cycle vertices; the theorem speaks about
    /// exactly these.
    pub subfield_trees: Vec<TreeProfile>,
    /// Trees rooted at the remaining cycle vertices, reported but not
    /// covered by any depth guarantee.
    pub other_trees: Vec<TreeProfile>,
}

impl TreeProfileReport {
    /// The depth shared by all subfield trees, when they agree and every
    /// leaf sits at full height; `None` as soon as anything diverges.
    pub fn common_subfield_depth(&self) -> Option<u32> {
        let first = self.subfield_trees.first()?;
        let d = first.depth;
        self.subfield_trees
            .iter()
            .all(|t| t.depth == d && t.leaves_at_full_depth)
            .then_some(d)
    }
}

/// Build the full successor graph; the field must be enumerable under its
/// cap.
pub fn build_graph(map: &RationalMap) -> Result<FunctionalGraph> {
    let ctx = Arc::clone(map.ctx());
    let q = ctx.order_u128();
    if q > ctx.enum_cap() as u128 {
        return Err(Error::FieldTooLarge {
            needed: q,
            cap: ctx.enum_cap(),
        });
    }
    let q = q as usize;
    let m = q + 1;

    let mut succ = vec![0u32; m];
    for x in ctx.elems()? {
        let i = x.index() as usize;
        succ[i] = match map.eval(&ProjPoint::Finite(x))? {
            ProjPoint::Finite(y) => y.index() as u32,
            ProjPoint::Infinity => q as u32,
        };
    }
    succ[q] = q as u32; // infinity is fixed: deg a > deg b

    // Cycle detection by path coloring: 0 unvisited, 1 on the current
    // path, 2 settled.
    let mut color = vec![0u8; m];
    let mut on_cycle = vec![false; m];
    let mut path: Vec<u32> = Vec::new();
    for v in 0..m {
        if color[v] != 0 {
            continue;
        }
        path.clear();
        let mut u = v;
        while color[u] == 0 {
            color[u] = 1;
            path.push(u as u32);
            u = succ[u] as usize;
        }
        if color[u] == 1 {
            // The walk closed on itself: everything from u onward cycles.
            let pos = path.iter().position(|&w| w as usize == u).unwrap();
            for &w in &path[pos..] {
                on_cycle[w as usize] = true;
            }
        }
        for &w in &path {
            color[w as usize] = 2;
        }
    }

    // Predecessor lists in compressed form.
    let mut pred_start = vec![0u32; m + 1];
    for &s in &succ {
        pred_start[s as usize + 1] += 1;
    }
    for i in 0..m {
        pred_start[i + 1] += pred_start[i];
    }
    let mut cursor = pred_start.clone();
    let mut pred_flat = vec![0u32; m];
    for (i, &s) in succ.iter().enumerate() {
        pred_flat[cursor[s as usize] as usize] = i as u32;
        cursor[s as usize] += 1;
    }

    Ok(FunctionalGraph {
        ctx,
        map: map.clone(),
        succ,
        on_cycle,
        pred_start,
        pred_flat,
    })
}

impl FunctionalGraph {
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn map(&self) -> &RationalMap {
        &self.map
    }

    /// Number of vertices, q + 1.
    pub fn vertex_count(&self) -> usize {
        self.succ.len()
    }

    pub fn successor(&self, v: usize) -> usize {
        self.succ[v] as usize
    }

    pub fn is_on_cycle(&self, v: usize) -> bool {
        self.on_cycle[v]
    }

    pub fn predecessors(&self, v: usize) -> &[u32] {
        &self.pred_flat[self.pred_start[v] as usize..self.pred_start[v + 1] as usize]
    }

    /// The point behind a vertex index.
    pub fn vertex(&self, v: usize) -> Result<ProjPoint> {
        if v + 1 == self.vertex_count() {
            Ok(ProjPoint::Infinity)
        } else if v < self.vertex_count() {
            Ok(ProjPoint::Finite(self.ctx.elem_at(v as u128)))
        } else {
            Err(Error::NodeNotFound)
        }
    }

    pub fn index_of(&self, pt: &ProjPoint) -> Result<usize> {
        match pt {
            ProjPoint::Infinity => Ok(self.vertex_count() - 1),
            ProjPoint::Finite(x) => {
                if !self.ctx.same_field(x.ctx()) {
                    return Err(Error::ContextMismatch);
                }
                Ok(x.index() as usize)
            }
        }
    }

    /// All cycles, each listed in successor order.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.vertex_count()];
        let mut out = Vec::new();
        for v in 0..self.vertex_count() {
            if !self.on_cycle[v] || seen[v] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut u = v;
            while !seen[u] {
                seen[u] = true;
                cyc.push(u);
                u = self.succ[u] as usize;
            }
            out.push(cyc);
        }
        out
    }

    /// Tail and cycle of the forward orbit of a point.
    pub fn trajectory_from(&self, start: &ProjPoint) -> Result<(Vec<ProjPoint>, Vec<ProjPoint>)> {
        let mut v = self.index_of(start)?;
        if v >= self.vertex_count() {
            return Err(Error::NodeNotFound);
        }
        let mut tail = Vec::new();
        while !self.on_cycle[v] {
            tail.push(self.vertex(v)?);
            v = self.succ[v] as usize;
        }
        let mut cycle = Vec::new();
        let first = v;
        loop {
            cycle.push(self.vertex(v)?);
            v = self.succ[v] as usize;
            if v == first {
                break;
            }
        }
        Ok((tail, cycle))
    }

    /// Membership of a vertex in P^1(F_{p^s}): fixed by the s-th Frobenius
    /// power, with infinity always included.
    fn vertex_in_subfield(&self, v: usize, frob_exp: &BigUint) -> Result<bool> {
        match self.vertex(v)? {
            ProjPoint::Infinity => Ok(true),
            ProjPoint::Finite(x) => Ok(x.pow_big(frob_exp) == x),
        }
    }

    /// Measure every tree hanging off a cycle vertex, split by whether the
    /// root lies in P^1 of the degree-s subfield. s must divide the field
    /// degree.
    pub fn tree_profiles(&self, subfield_deg: u32) -> Result<TreeProfileReport> {
        let n = self.ctx.degree() as u32;
        if subfield_deg == 0 || n % subfield_deg != 0 {
            return Err(Error::SubfieldMismatch {
                sub: subfield_deg,
                ext: n,
            });
        }
        let frob_exp = BigUint::from(self.ctx.p()).pow(subfield_deg);
        let cycles = self.cycles();
        let mut subfield_trees = Vec::new();
        let mut other_trees = Vec::new();
        for cyc in &cycles {
            for &root in cyc {
                let profile = self.measure_tree(root, &frob_exp)?;
                if profile.root_in_subfield {
                    subfield_trees.push(profile);
                } else {
                    other_trees.push(profile);
                }
            }
        }
        Ok(TreeProfileReport {
            subfield_deg,
            cycle_count: cycles.len(),
            cycle_lengths: cycles.iter().map(|c| c.len()).collect(),
            subfield_trees,
            other_trees,
        })
    }

    fn measure_tree(&self, root: usize, frob_exp: &BigUint) -> Result<TreeProfile> {
        let mut size = 0usize;
        let mut depth = 0u32;
        let mut leaves_at_full_depth = true;
        let mut min_leaf = u32::MAX;
        let mut stack: Vec<(u32, u32)> = vec![(root as u32, 0)];
        while let Some((u, h)) = stack.pop() {
            let mut has_kids = false;
            for &w in self.predecessors(u as usize) {
                if !self.on_cycle[w as usize] {
                    has_kids = true;
                    size += 1;
                    depth = depth.max(h + 1);
                    stack.push((w, h + 1));
                }
            }
            if !has_kids && u as usize != root {
                min_leaf = min_leaf.min(h);
            }
        }
        if size > 0 && min_leaf != depth {
            leaves_at_full_depth = false;
        }
        Ok(TreeProfile {
            root,
            root_in_subfield: self.vertex_in_subfield(root, frob_exp)?,
            size,
            depth,
            leaves_at_full_depth,
        })
    }
}

/// Tail and cycle of the forward orbit of a point under the map, found by
/// direct iteration with a visited table. Works without materializing the
/// graph, so the field only needs to be large enough for the orbit, not
/// enumerable.
pub fn trajectory(
    map: &RationalMap,
    start: &ProjPoint,
) -> Result<(Vec<ProjPoint>, Vec<ProjPoint>)> {
    let infinity_key = u128::MAX;
    let key = |pt: &ProjPoint| match pt {
        ProjPoint::Infinity => infinity_key,
        ProjPoint::Finite(x) => x.index(),
    };
    let mut order: Vec<ProjPoint> = Vec::new();
    let mut seen: HashMap<u128, usize> = HashMap::new();
    let mut cur = start.clone();
    loop {
        match seen.get(&key(&cur)) {
            Some(&at) => {
                let cycle = order.split_off(at);
                return Ok((order, cycle));
            }
            None => {
                seen.insert(key(&cur), order.len());
                order.push(cur.clone());
                cur = map.eval(&cur)?;
            }
        }
    }
}
