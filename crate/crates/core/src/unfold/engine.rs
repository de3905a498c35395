//! Window-tracing depth-first development shared by billiards and surfaces.
//!
//! From a start corner every other corner is visible through a chain of
//! copies. Each tree node holds one copy and the open cone of directions
//! from the apex that enter it through its entry edge. Cone bounds are always
//! corner images, so a corner strictly inside the cone is the first corner
//! hit in its direction and one strictly on a bound sits behind an earlier
//! corner.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;

use crate::geom::{wedge, PlanarVec, Vec2};
use crate::real::Real;

/// How copies are laid out in the plane.
pub(crate) trait Develop<E: Real>: Sync {
    type Frame: Clone + Send + Sync;
    type Hp: Clone;

    /// Vertices of the copy in the developing plane.
    fn place(&self, f: &Self::Frame, out: &mut Vec<PlanarVec>);
    /// Copy across `edge`, and the index of that same edge in the new copy.
    fn step(&self, f: &Self::Frame, edge: usize) -> (Self::Frame, usize);
    /// Letter recorded when crossing `edge` out of `f`.
    fn label(&self, f: &Self::Frame, edge: usize) -> u32;
    fn hp_root(&self, f: &Self::Frame) -> Self::Hp;
    fn hp_step(&self, h: &Self::Hp, f: &Self::Frame, edge: usize) -> Self::Hp;
    fn hp_vertex(&self, h: &Self::Hp, f: &Self::Frame, v: usize) -> Vec2<E>;
    /// Double-precision predicates are already exact.
    fn exact(&self) -> bool;
}

#[derive(Clone, Debug)]
pub(crate) struct Start<F> {
    pub frame: F,
    pub vertex: usize,
    pub id: usize,
}

pub(crate) struct Hit<'a, F> {
    pub start: usize,
    pub depth: usize,
    pub end_vertex: usize,
    pub end_frame: &'a F,
    pub holonomy: PlanarVec,
    /// Crossing letters from the root to the end copy.
    pub path: &'a [u32],
}

pub(crate) trait Visitor<F>: Send {
    fn hit(&mut self, h: &Hit<'_, F>);
    fn merge(&mut self, other: Self);
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Limits {
    pub max_depth: usize,
    /// Skip copies whose entry edge lies farther than this from the apex.
    pub max_dist: Option<f64>,
    pub node_budget: u64,
    pub epsilon: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumStats {
    pub nodes: u64,
    pub escalations: u64,
    pub degenerate: u64,
    pub truncated: bool,
}

impl EnumStats {
    fn add(&mut self, o: &EnumStats) {
        self.nodes += o.nodes;
        self.escalations += o.escalations;
        self.degenerate += o.degenerate;
        self.truncated |= o.truncated;
    }
}

#[derive(Clone, Copy, Debug)]
struct Bound {
    p: PlanarVec,
    level: u32,
    vertex: u32,
}

struct Level<F, H> {
    frame: F,
    verts: Vec<PlanarVec>,
    entry: Option<usize>,
    r: Bound,
    l: Bound,
    hp: Option<H>,
    cursor: usize,
    emitted: bool,
}

struct Shared {
    nodes: AtomicU64,
    abort: AtomicBool,
}

struct Walker<'a, D: Develop<E>, E: Real> {
    dev: &'a D,
    lim: Limits,
    shared: &'a Shared,
    start: usize,
    start_vertex: usize,
    apex: PlanarVec,
    hp_apex: Option<Vec2<E>>,
    /// Squared relative collinearity tolerance at escalated precision.
    hp_tol: E,
    stack: Vec<Level<D::Frame, D::Hp>>,
    /// `path[i]` is the letter crossed to reach level `i + 1`.
    path: Vec<u32>,
    vias: Vec<usize>,
    stats: EnumStats,
    scratch: Vec<PlanarVec>,
}

fn dist_to_segment(a: PlanarVec, b: PlanarVec) -> f64 {
    let d = b - a;
    let t = (-a.dot(&d) / d.norm_sq()).clamp(0.0, 1.0);
    (a + t * d).norm()
}

impl<'a, D: Develop<E>, E: Real> Walker<'a, D, E> {
    fn new(dev: &'a D, lim: Limits, shared: &'a Shared, s: &Start<D::Frame>) -> Self {
        let mut scratch = Vec::new();
        dev.place(&s.frame, &mut scratch);
        let apex = scratch[s.vertex];
        let n = scratch.len();
        let verts: Vec<PlanarVec> = scratch.iter().map(|p| *p - apex).collect();
        let b = |v: usize| Bound {
            p: verts[v],
            level: 0,
            vertex: v as u32,
        };
        let root = Level {
            frame: s.frame.clone(),
            r: b((s.vertex + 1) % n),
            l: b((s.vertex + n - 1) % n),
            verts,
            entry: None,
            hp: None,
            cursor: 0,
            emitted: false,
        };
        Walker {
            dev,
            lim,
            shared,
            start: s.id,
            start_vertex: s.vertex,
            apex,
            hp_apex: None,
            hp_tol: E::from_decimal(&format!("1e-{}", 2 * E::DIGITS.saturating_sub(8))).expect("literal"),
            stack: vec![root],
            path: vec![],
            vias: vec![],
            stats: EnumStats::default(),
            scratch,
        }
    }

    fn hp_point(&mut self, level: u32, vertex: u32) -> Vec2<E> {
        let level = level as usize;
        let first_missing = (0..=level).find(|&i| self.stack[i].hp.is_none());
        if let Some(from) = first_missing {
            for i in from..=level {
                let h = if i == 0 {
                    self.dev.hp_root(&self.stack[0].frame)
                } else {
                    let parent = &self.stack[i - 1];
                    self.dev
                        .hp_step(parent.hp.as_ref().expect("filled"), &parent.frame, self.vias[i - 1])
                };
                self.stack[i].hp = Some(h);
            }
        }
        if self.hp_apex.is_none() {
            let root = &self.stack[0];
            self.hp_apex = Some(
                self.dev
                    .hp_vertex(root.hp.as_ref().expect("filled"), &root.frame, self.start_vertex),
            );
        }
        let lv = &self.stack[level];
        let p = self
            .dev
            .hp_vertex(lv.hp.as_ref().expect("filled"), &lv.frame, vertex as usize);
        p - self.hp_apex.clone().expect("filled")
    }

    /// Sign of `wedge(a, b)`; zero only for certified collinearity.
    fn orient(&mut self, a: Bound, b: Bound) -> i8 {
        let w = wedge(&a.p, &b.p);
        if self.dev.exact() {
            return sign(w);
        }
        let scale = a.p.norm() * b.p.norm();
        if w.abs() > self.lim.epsilon * scale {
            return sign(w);
        }
        // The same corner image reached along another path.
        if (a.p - b.p).norm_sq() <= 1e-18 * scale {
            return 0;
        }
        self.stats.escalations += 1;
        let ha = self.hp_point(a.level, a.vertex);
        let hb = self.hp_point(b.level, b.vertex);
        let hw = wedge(&ha, &hb);
        let tol_sq = self.hp_tol.clone() * ha.norm_sq() * hb.norm_sq();
        if hw.square() > tol_sq {
            if hw > E::from_i64(0) {
                1
            } else {
                -1
            }
        } else {
            self.stats.degenerate += 1;
            0
        }
    }

    fn tick(&mut self) -> bool {
        self.stats.nodes += 1;
        if self.stats.nodes % 1024 == 0 {
            let total = self.shared.nodes.fetch_add(1024, Ordering::Relaxed) + 1024;
            if total > self.lim.node_budget {
                self.shared.abort.store(true, Ordering::Relaxed);
            }
        }
        if self.shared.abort.load(Ordering::Relaxed) {
            self.stats.truncated = true;
            return false;
        }
        true
    }

    fn skip_vertex(&self, lv: &Level<D::Frame, D::Hp>, v: usize) -> bool {
        let n = lv.verts.len();
        match lv.entry {
            None => v == self.start_vertex || v == (self.start_vertex + 1) % n || (v + 1) % n == self.start_vertex,
            Some(e) => v == e || v == (e + 1) % n,
        }
    }

    fn skip_edge(&self, lv: &Level<D::Frame, D::Hp>, f: usize) -> bool {
        let n = lv.verts.len();
        match lv.entry {
            None => f == self.start_vertex || (f + 1) % n == self.start_vertex,
            Some(e) => f == e,
        }
    }

    fn emit<V: Visitor<D::Frame>>(&mut self, vis: &mut V) {
        let d = self.stack.len() - 1;
        let n = self.stack[d].verts.len();
        for v in 0..n {
            if self.skip_vertex(&self.stack[d], v) {
                continue;
            }
            let lv = &self.stack[d];
            let w = Bound {
                p: lv.verts[v],
                level: d as u32,
                vertex: v as u32,
            };
            let (r, l) = (lv.r, lv.l);
            if self.orient(r, w) > 0 && self.orient(w, l) > 0 {
                let lv = &self.stack[d];
                vis.hit(&Hit {
                    start: self.start,
                    depth: d,
                    end_vertex: v,
                    end_frame: &lv.frame,
                    holonomy: lv.verts[v],
                    path: &self.path,
                });
            }
        }
    }

    /// Cone of the child across edge `f` of the top copy, if nonempty.
    fn child_window(&mut self, f: usize) -> Option<(Bound, Bound)> {
        let d = self.stack.len() - 1;
        let lv = &self.stack[d];
        let n = lv.verts.len();
        let pa = Bound {
            p: lv.verts[f],
            level: d as u32,
            vertex: f as u32,
        };
        let pb = Bound {
            p: lv.verts[(f + 1) % n],
            level: d as u32,
            vertex: ((f + 1) % n) as u32,
        };
        let (r, l) = (lv.r, lv.l);
        if let Some(m) = self.lim.max_dist {
            if dist_to_segment(pa.p, pb.p) > m {
                return None;
            }
        }
        let (lo, hi) = match self.orient(pa, pb) {
            1 => (pa, pb),
            -1 => (pb, pa),
            _ => return None,
        };
        let nr = if self.orient(r, lo) > 0 { lo } else { r };
        let nl = if self.orient(hi, l) > 0 { hi } else { l };
        (self.orient(nr, nl) > 0).then_some((nr, nl))
    }

    fn push_child(&mut self, f: usize, r: Bound, l: Bound) {
        let d = self.stack.len() - 1;
        let (frame, entry) = self.dev.step(&self.stack[d].frame, f);
        let letter = self.dev.label(&self.stack[d].frame, f);
        self.scratch.clear();
        self.dev.place(&frame, &mut self.scratch);
        let apex = self.apex;
        let verts = self.scratch.iter().map(|p| *p - apex).collect();
        self.stack.push(Level {
            frame,
            verts,
            entry: Some(entry),
            r,
            l,
            hp: None,
            cursor: 0,
            emitted: false,
        });
        self.path.push(letter);
        self.vias.push(f);
    }

    fn pop(&mut self) {
        self.stack.pop();
        self.path.pop();
        self.vias.pop();
    }

    /// Next nonempty child of the top copy, advancing its cursor.
    fn next_child(&mut self) -> Option<(usize, Bound, Bound)> {
        let d = self.stack.len() - 1;
        if d >= self.lim.max_depth {
            return None;
        }
        let n = self.stack[d].verts.len();
        while self.stack[d].cursor < n {
            let f = self.stack[d].cursor;
            self.stack[d].cursor += 1;
            if self.skip_edge(&self.stack[d], f) {
                continue;
            }
            if let Some((r, l)) = self.child_window(f) {
                return Some((f, r, l));
            }
        }
        None
    }

    /// Walks an edge path from the root without emitting anything.
    fn replay(&mut self, edges: &[usize]) {
        for &f in edges {
            let (r, l) = self.child_window(f).expect("replayed path stays nonempty");
            self.push_child(f, r, l);
        }
    }

    /// Depth-first walk of the subtree under the top copy. Copies at
    /// `split_depth` are reported to `frontier` instead of being expanded.
    fn walk<V: Visitor<D::Frame>>(
        &mut self,
        vis: &mut V,
        split_depth: Option<usize>,
        frontier: &mut Vec<Vec<usize>>,
    ) {
        let base = self.stack.len();
        loop {
            let d = self.stack.len() - 1;
            if !self.stack[d].emitted {
                self.stack[d].emitted = true;
                if !self.tick() {
                    return;
                }
                if Some(d) == split_depth {
                    frontier.push(self.vias.clone());
                    self.pop();
                    if self.stack.len() < base {
                        return;
                    }
                    continue;
                }
                self.emit(vis);
            }
            match self.next_child() {
                Some((f, r, l)) => self.push_child(f, r, l),
                None => {
                    if self.stack.len() == base {
                        return;
                    }
                    self.pop();
                }
            }
        }
    }
}

fn sign(w: f64) -> i8 {
    if w > 0.0 {
        1
    } else if w < 0.0 {
        -1
    } else {
        0
    }
}

/// Target number of independent subtrees handed to the thread pool.
const TASKS: usize = 512;

/// Walks every start and returns the merged visitor. The result does not
/// depend on the number of worker threads.
pub(crate) fn run<D, E, V>(
    dev: &D,
    starts: &[Start<D::Frame>],
    lim: Limits,
    make: impl Fn() -> V + Sync,
) -> (V, EnumStats)
where
    D: Develop<E>,
    E: Real,
    V: Visitor<D::Frame>,
{
    let shared = Shared {
        nodes: AtomicU64::new(0),
        abort: AtomicBool::new(false),
    };
    // Count nodes level by level on a throwaway pass to choose the split.
    let split = {
        let probe = Shared {
            nodes: AtomicU64::new(0),
            abort: AtomicBool::new(false),
        };
        let mut d = 0;
        loop {
            if d >= lim.max_depth || d >= 24 {
                break d;
            }
            let mut frontier = vec![];
            for s in starts {
                let mut w = Walker::<D, E>::new(dev, lim, &probe, s);
                w.walk(&mut NullVisitor, Some(d), &mut frontier);
            }
            if frontier.len() >= TASKS {
                break d;
            }
            d += 1;
        }
    };

    let mut head = make();
    let mut stats = EnumStats::default();
    let mut tasks: Vec<(usize, Vec<usize>)> = vec![];
    for (si, s) in starts.iter().enumerate() {
        let mut w = Walker::<D, E>::new(dev, lim, &shared, s);
        let mut frontier = vec![];
        w.walk(&mut head, Some(split), &mut frontier);
        stats.add(&w.stats);
        tasks.extend(frontier.into_iter().map(|p| (si, p)));
    }
    let parts: Vec<(V, EnumStats)> = tasks
        .par_iter()
        .map(|(si, p)| {
            let mut w = Walker::<D, E>::new(dev, lim, &shared, &starts[*si]);
            w.replay(p);
            let mut v = make();
            let mut none = vec![];
            w.walk(&mut v, None, &mut none);
            (v, w.stats)
        })
        .collect();
    for (v, s) in parts {
        head.merge(v);
        stats.add(&s);
    }
    stats.truncated |= shared.abort.load(Ordering::Relaxed);
    (head, stats)
}

struct NullVisitor;

impl<F> Visitor<F> for NullVisitor {
    fn hit(&mut self, _: &Hit<'_, F>) {}
    fn merge(&mut self, _: Self) {}
}
