//! Block system of the transmission equations.
//!
//! Unknowns are ordered `(u_ℬ, w_ℬ)`: all `u` traces in ℬ order, then all `w`
//! traces. For the pair `(i, j)` the standard row, taken from region `j`, is
//!
//! ```text
//! s [ ½u_ij − Σ_{T_j⁻} D u + Σ_{T_j⁺} D u + ε_j Σ_{T_j⁻} S w − ε_j Σ_{T_j⁺} S w ] = 0
//! ```
//!
//! with `s = −α₁` in the Calderon form. The Burton–Miller row, taken from
//! region `i`, is
//!
//! ```text
//! ½u_ij + (α_i ε_i/2) w_ij + Σ_{T_i⁺} (D + α_i N) u − Σ_{T_i⁻} (D + α_i N) u
//!       − ε_i Σ_{T_i⁺} (S + α_i D*) w + ε_i Σ_{T_i⁻} (S + α_i D*) w = δ_{i1}(u_in + α₁ε₁ w_in)
//! ```

use std::ops::Range;

use num_complex::{Complex32, Complex64 as C64};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{incident_plane_wave, ElementIntegrals, KernelKind, OperatorMask, SourcePanel};
use crate::mesh::Element;
use crate::scene::{DomainGraph, RegionId};
use crate::solver::LinearOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquationKind {
    Standard,
    BurtonMiller,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Density {
    U,
    W,
}

/// Coupling coefficients and row arrangement of one system.
#[derive(Debug, Clone, PartialEq)]
pub struct Formulation {
    /// `α_r` by region (index `r − 1`); `None` where no value was chosen.
    pub alphas: Vec<Option<C64>>,
    /// Factor applied to every standard row.
    pub std_scale: C64,
    /// Place the Burton–Miller rows first.
    pub bm_first: bool,
}

impl Formulation {
    /// Calderon form with `α_r = γ_r α₁`; `gammas[0]` is ignored since α₁ is fixed.
    pub fn calderon(graph: &DomainGraph, gammas: &[Option<f64>]) -> Result<Self> {
        if gammas.len() != graph.num_regions() {
            return Err(Error::DimensionMismatch {
                expected: graph.num_regions(),
                got: gammas.len(),
            });
        }
        let a1 = graph.alpha1();
        let mut alphas: Vec<Option<C64>> = gammas.iter().map(|g| g.map(|g| a1 * g)).collect();
        alphas[0] = Some(a1);
        Ok(Self {
            alphas,
            std_scale: -a1,
            bm_first: false,
        })
    }

    /// Calderon form with P1 everywhere: `α_r = α₁/ε_r`.
    pub fn all_p1(graph: &DomainGraph) -> Self {
        let gammas: Vec<Option<f64>> = graph.epsilons().iter().map(|e| Some(1.0 / e)).collect();
        Self::calderon(graph, &gammas).expect("one gamma per region")
    }

    /// Baseline: `α_r = 0` for `r ≠ 1`, rows interchanged, no scaling.
    pub fn conventional(graph: &DomainGraph) -> Self {
        let mut alphas = vec![Some(C64::default()); graph.num_regions()];
        alphas[0] = Some(graph.alpha1());
        Self {
            alphas,
            std_scale: C64::new(1.0, 0.0),
            bm_first: true,
        }
    }

    fn alpha(&self, region: RegionId) -> Result<C64> {
        self.alphas
            .get(region - 1)
            .copied()
            .flatten()
            .ok_or(Error::MissingAlpha(region))
    }
}

/// Maps block rows/columns to equations and densities, and blocks to
/// global index ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockIndexMap {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    bm_first: bool,
}

impl BlockIndexMap {
    pub fn new(sizes: Vec<usize>, bm_first: bool) -> Self {
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        offsets.push(0);
        for s in &sizes {
            offsets.push(offsets.last().unwrap() + s);
        }
        Self {
            sizes,
            offsets,
            bm_first,
        }
    }

    /// `N_ℬ`.
    pub fn num_interfaces(&self) -> usize {
        self.sizes.len()
    }

    pub fn num_blocks(&self) -> usize {
        2 * self.sizes.len()
    }

    /// Total element count `N`.
    pub fn num_elements(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn dim(&self) -> usize {
        2 * self.num_elements()
    }

    pub fn interface_size(&self, b: usize) -> usize {
        self.sizes[b]
    }

    pub fn bm_first(&self) -> bool {
        self.bm_first
    }

    pub fn row_block(&self, br: usize) -> (EquationKind, usize) {
        let nb = self.num_interfaces();
        let upper = br < nb;
        let kind = if upper != self.bm_first {
            EquationKind::Standard
        } else {
            EquationKind::BurtonMiller
        };
        (kind, br % nb)
    }

    pub fn row_block_of(&self, kind: EquationKind, b: usize) -> usize {
        let upper = (kind == EquationKind::Standard) != self.bm_first;
        if upper {
            b
        } else {
            b + self.num_interfaces()
        }
    }

    pub fn col_block(&self, bc: usize) -> (Density, usize) {
        let nb = self.num_interfaces();
        if bc < nb {
            (Density::U, bc)
        } else {
            (Density::W, bc - nb)
        }
    }

    pub fn col_block_of(&self, density: Density, b: usize) -> usize {
        match density {
            Density::U => b,
            Density::W => b + self.num_interfaces(),
        }
    }

    /// Global index range of block row or column `blk`.
    pub fn range(&self, blk: usize) -> Range<usize> {
        let nb = self.num_interfaces();
        let b = blk % nb;
        let start = (blk / nb) * self.num_elements() + self.offsets[b];
        start..start + self.sizes[b]
    }
}

/// One operator contribution `coeff · op^region` to a block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpTerm {
    pub op: KernelKind,
    pub region: RegionId,
    pub coeff: C64,
}

/// Symbolic content of one block: `identity · I + Σ terms`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BlockEntry {
    pub identity: C64,
    pub terms: Vec<OpTerm>,
}

impl BlockEntry {
    pub fn is_zero(&self) -> bool {
        self.identity == C64::default() && self.terms.is_empty()
    }

    fn push(&mut self, op: KernelKind, region: RegionId, coeff: C64) {
        if coeff != C64::default() {
            self.terms.push(OpTerm { op, region, coeff });
        }
    }

    /// Coefficient of `op^region` (summed over duplicates).
    pub fn coeff(&self, op: KernelKind, region: RegionId) -> C64 {
        self.terms
            .iter()
            .filter(|t| t.op == op && t.region == region)
            .map(|t| t.coeff)
            .sum()
    }
}

/// Block-level description of the whole system.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPlan {
    pub map: BlockIndexMap,
    entries: Vec<BlockEntry>,
}

impl BlockPlan {
    pub fn build(graph: &DomainGraph, sizes: Vec<usize>, formulation: &Formulation) -> Result<Self> {
        let nb = graph.len();
        if sizes.len() != nb {
            return Err(Error::MissingMesh(sizes.len().min(nb)));
        }
        let map = BlockIndexMap::new(sizes, formulation.bm_first);
        let nblk = map.num_blocks();
        let mut entries = vec![BlockEntry::default(); nblk * nblk];
        let half = C64::new(0.5, 0.0);
        for (a, iface) in graph.interfaces().iter().enumerate() {
            let (i, j) = (iface.from, iface.to);

            let br = map.row_block_of(EquationKind::Standard, a);
            let s = formulation.std_scale;
            let ej = graph.epsilon(j);
            entries[br * nblk + map.col_block_of(Density::U, a)].identity += s * half;
            for (b, sign) in signed_positions(graph, j) {
                let eu = &mut entries[br * nblk + map.col_block_of(Density::U, b)];
                eu.push(KernelKind::D, j, s * sign);
                let ew = &mut entries[br * nblk + map.col_block_of(Density::W, b)];
                ew.push(KernelKind::S, j, -s * sign * ej);
            }

            let br = map.row_block_of(EquationKind::BurtonMiller, a);
            let alpha = formulation.alpha(i)?;
            let ei = graph.epsilon(i);
            entries[br * nblk + map.col_block_of(Density::U, a)].identity += half;
            entries[br * nblk + map.col_block_of(Density::W, a)].identity += alpha * ei * 0.5;
            for (b, sign) in signed_positions(graph, i) {
                let eu = &mut entries[br * nblk + map.col_block_of(Density::U, b)];
                eu.push(KernelKind::D, i, C64::new(sign, 0.0));
                eu.push(KernelKind::N, i, alpha * sign);
                let ew = &mut entries[br * nblk + map.col_block_of(Density::W, b)];
                ew.push(KernelKind::S, i, C64::new(-sign * ei, 0.0));
                ew.push(KernelKind::DStar, i, -alpha * sign * ei);
            }
        }
        Ok(Self { map, entries })
    }

    pub fn entry(&self, br: usize, bc: usize) -> &BlockEntry {
        &self.entries[br * self.map.num_blocks() + bc]
    }

    pub fn nonzero_blocks(&self) -> usize {
        self.entries.iter().filter(|e| !e.is_zero()).count()
    }
}

/// Interfaces touching `region` with `+1` for outward (`T⁺`) and `−1` for
/// inward (`T⁻`) orientation.
fn signed_positions(graph: &DomainGraph, region: RegionId) -> Vec<(usize, f64)> {
    let mut v: Vec<(usize, f64)> = graph
        .outward_positions(region)
        .into_iter()
        .map(|b| (b, 1.0))
        .chain(graph.inward_positions(region).into_iter().map(|b| (b, -1.0)))
        .collect();
    v.sort_by_key(|&(b, _)| b);
    v
}

/// Storage precision of the matrix blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Double,
    Single,
    /// Double unless the double-precision blocks would exceed this many bytes.
    Auto { budget_bytes: usize },
}

impl Default for Precision {
    fn default() -> Self {
        Precision::Auto {
            budget_bytes: 2 << 30,
        }
    }
}

/// Complex storage type for matrix entries.
pub trait Scalar: Copy + Default + Send + Sync + 'static {
    fn from_c64(z: C64) -> Self;
    fn to_c64(self) -> C64;
}

impl Scalar for C64 {
    #[inline]
    fn from_c64(z: C64) -> Self {
        z
    }
    #[inline]
    fn to_c64(self) -> C64 {
        self
    }
}

impl Scalar for Complex32 {
    #[inline]
    fn from_c64(z: C64) -> Self {
        Complex32::new(z.re as f32, z.im as f32)
    }
    #[inline]
    fn to_c64(self) -> C64 {
        C64::new(self.re as f64, self.im as f64)
    }
}

#[derive(Debug, Clone)]
pub enum BlockData {
    F64(Vec<C64>),
    F32(Vec<Complex32>),
}

/// Dense row-major block.
#[derive(Debug, Clone)]
pub struct Block {
    pub rows: usize,
    pub cols: usize,
    pub data: BlockData,
}

impl Block {
    pub fn get(&self, r: usize, c: usize) -> C64 {
        match &self.data {
            BlockData::F64(d) => d[r * self.cols + c],
            BlockData::F32(d) => d[r * self.cols + c].to_c64(),
        }
    }

    #[inline]
    fn row_dot(&self, r: usize, x: &[C64]) -> C64 {
        fn dot<T: Scalar>(row: &[T], x: &[C64]) -> C64 {
            row.iter().zip(x).map(|(a, b)| a.to_c64() * b).sum()
        }
        let span = r * self.cols..(r + 1) * self.cols;
        match &self.data {
            BlockData::F64(d) => dot(&d[span], x),
            BlockData::F32(d) => dot(&d[span], x),
        }
    }
}

/// Block-sparse system matrix: zero blocks are not stored.
#[derive(Debug, Clone)]
pub struct SystemMatrix {
    map: BlockIndexMap,
    blocks: Vec<Option<Block>>,
    single: bool,
}

impl SystemMatrix {
    pub fn map(&self) -> &BlockIndexMap {
        &self.map
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn is_single_precision(&self) -> bool {
        self.single
    }

    pub fn block(&self, br: usize, bc: usize) -> Option<&Block> {
        self.blocks[br * self.map.num_blocks() + bc].as_ref()
    }

    /// Entry `(i, j)` by global index.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        let nblk = self.map.num_blocks();
        let find = |g: usize| {
            (0..nblk)
                .find(|&b| self.map.range(b).contains(&g))
                .expect("index in range")
        };
        let (br, bc) = (find(i), find(j));
        self.block(br, bc)
            .map(|b| b.get(i - self.map.range(br).start, j - self.map.range(bc).start))
            .unwrap_or_default()
    }

    pub fn storage_bytes(&self) -> usize {
        let per = if self.single { 8 } else { 16 };
        self.blocks
            .iter()
            .flatten()
            .map(|b| b.rows * b.cols * per)
            .sum()
    }

    pub fn matvec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut y = vec![C64::default(); self.dim()];
        self.apply(x, &mut y);
        Ok(y)
    }

    /// Dense copy, optionally with column `j` scaled by `col_scale[j]`.
    pub fn to_dense(&self, col_scale: Option<&[C64]>) -> faer::Mat<C64> {
        let n = self.dim();
        let nblk = self.map.num_blocks();
        let mut m = faer::Mat::<C64>::zeros(n, n);
        for br in 0..nblk {
            let rr = self.map.range(br);
            for bc in 0..nblk {
                let Some(block) = self.block(br, bc) else {
                    continue;
                };
                let cr = self.map.range(bc);
                for r in 0..block.rows {
                    for c in 0..block.cols {
                        let s = col_scale.map_or(C64::new(1.0, 0.0), |s| s[cr.start + c]);
                        m[(rr.start + r, cr.start + c)] = block.get(r, c) * s;
                    }
                }
            }
        }
        m
    }
}

impl LinearOperator for SystemMatrix {
    fn dim(&self) -> usize {
        self.map.dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let nblk = self.map.num_blocks();
        for br in 0..nblk {
            let rr = self.map.range(br);
            let row_blocks: Vec<(&Block, &[C64])> = (0..nblk)
                .filter_map(|bc| self.block(br, bc).map(|b| (b, &x[self.map.range(bc)])))
                .collect();
            y[rr].par_iter_mut().enumerate().for_each(|(r, yr)| {
                *yr = row_blocks.iter().map(|(b, xs)| b.row_dot(r, xs)).sum();
            });
        }
    }
}

/// Regions and operator masks needed by the blocks of one interface pair.
fn pair_masks(entries: &[&BlockEntry]) -> Vec<(RegionId, OperatorMask)> {
    let mut out: Vec<(RegionId, OperatorMask)> = Vec::new();
    for t in entries.iter().flat_map(|e| &e.terms) {
        match out.iter_mut().find(|(r, _)| *r == t.region) {
            Some((_, m)) => *m = m.with(t.op),
            None => out.push((t.region, OperatorMask::NONE.with(t.op))),
        }
    }
    out
}

/// Assemble the collocation system. `patches[b]` holds the elements of the
/// `b`-th interface, oriented from `from` into `to`.
pub fn assemble_system(
    graph: &DomainGraph,
    patches: &[Vec<Element>],
    formulation: &Formulation,
    precision: Precision,
) -> Result<SystemMatrix> {
    if patches.len() != graph.len() {
        return Err(Error::MissingMesh(patches.len().min(graph.len())));
    }
    if let Some(b) = patches.iter().position(|p| p.is_empty()) {
        return Err(Error::MissingMesh(b));
    }
    let plan = BlockPlan::build(graph, patches.iter().map(|p| p.len()).collect(), formulation)?;
    let double_bytes: usize = (0..plan.map.num_blocks())
        .flat_map(|br| (0..plan.map.num_blocks()).map(move |bc| (br, bc)))
        .filter(|&(br, bc)| !plan.entry(br, bc).is_zero())
        .map(|(br, bc)| plan.map.range(br).len() * plan.map.range(bc).len() * 16)
        .sum();
    let single = match precision {
        Precision::Double => false,
        Precision::Single => true,
        Precision::Auto { budget_bytes } => double_bytes > budget_bytes,
    };
    if single {
        assemble_with::<Complex32>(graph, patches, plan, true)
    } else {
        assemble_with::<C64>(graph, patches, plan, false)
    }
}

fn wrap<T: Scalar>(v: Vec<T>) -> BlockData {
    let any: Box<dyn std::any::Any> = Box::new(v);
    match any.downcast::<Vec<C64>>() {
        Ok(d) => BlockData::F64(*d),
        Err(any) => BlockData::F32(*any.downcast::<Vec<Complex32>>().expect("known scalar")),
    }
}

fn assemble_with<T: Scalar>(
    graph: &DomainGraph,
    patches: &[Vec<Element>],
    plan: BlockPlan,
    single: bool,
) -> Result<SystemMatrix> {
    let map = plan.map.clone();
    let nb = map.num_interfaces();
    let nblk = map.num_blocks();
    let panels: Vec<Vec<SourcePanel>> = patches
        .iter()
        .map(|p| p.iter().map(SourcePanel::new).collect())
        .collect();
    let mut blocks: Vec<Option<Block>> = vec![None; nblk * nblk];
    for a in 0..nb {
        let rows = &patches[a];
        let brs = [
            map.row_block_of(EquationKind::Standard, a),
            map.row_block_of(EquationKind::BurtonMiller, a),
        ];
        for b in 0..nb {
            let cols = &panels[b];
            let bcs = [map.col_block_of(Density::U, b), map.col_block_of(Density::W, b)];
            let slots: Vec<(usize, usize)> = brs
                .iter()
                .flat_map(|&br| bcs.iter().map(move |&bc| (br, bc)))
                .collect();
            let entries: Vec<&BlockEntry> = slots.iter().map(|&(br, bc)| plan.entry(br, bc)).collect();
            if entries.iter().all(|e| e.is_zero()) {
                continue;
            }
            let masks = pair_masks(&entries);
            let wavenumbers: Vec<f64> = masks.iter().map(|&(r, _)| graph.wavenumber(r)).collect();
            let (nr, nc) = (rows.len(), cols.len());
            // Zero blocks get a one-entry-per-row dummy so the four row
            // iterators stay in lockstep.
            let mut bufs: Vec<Vec<T>> = entries
                .iter()
                .map(|e| {
                    if e.is_zero() {
                        vec![T::default(); nr]
                    } else {
                        vec![T::default(); nr * nc]
                    }
                })
                .collect();
            let widths: Vec<usize> = entries.iter().map(|e| if e.is_zero() { 1 } else { nc }).collect();
            let [b0, b1, b2, b3] = &mut bufs[..] else {
                unreachable!()
            };
            b0.par_chunks_mut(widths[0])
                .zip(b1.par_chunks_mut(widths[1]))
                .zip(b2.par_chunks_mut(widths[2]))
                .zip(b3.par_chunks_mut(widths[3]))
                .enumerate()
                .for_each(|(r, (((r0, r1), r2), r3))| {
                    let out: [&mut [T]; 4] = [r0, r1, r2, r3];
                    let (x, nx) = (rows[r].centroid, rows[r].normal);
                    let mut ints = vec![ElementIntegrals::default(); masks.len()];
                    for (c, panel) in cols.iter().enumerate() {
                        for (m, &(_, mask)) in masks.iter().enumerate() {
                            ints[m] = panel.integrals(wavenumbers[m], x, nx, mask);
                        }
                        for (slot, e) in entries.iter().enumerate() {
                            if e.is_zero() {
                                continue;
                            }
                            let mut v = if a == b && r == c { e.identity } else { C64::default() };
                            for t in &e.terms {
                                let m = masks.iter().position(|&(reg, _)| reg == t.region).unwrap();
                                v += t.coeff * ints[m].get(t.op);
                            }
                            out[slot][c] = T::from_c64(v);
                        }
                    }
                });
            for ((slot, e), buf) in slots.iter().zip(&entries).zip(bufs) {
                if !e.is_zero() {
                    blocks[slot.0 * nblk + slot.1] = Some(Block {
                        rows: nr,
                        cols: nc,
                        data: wrap(buf),
                    });
                }
            }
        }
    }
    Ok(SystemMatrix {
        map,
        blocks,
        single,
    })
}

/// Right-hand side: `u_in + α₁ε₁ w_in` on the Burton–Miller rows of
/// interfaces leaving region 1, zero elsewhere.
pub fn assemble_rhs(
    graph: &DomainGraph,
    patches: &[Vec<Element>],
    map: &BlockIndexMap,
    direction: crate::geom::Vec3,
) -> Result<Vec<C64>> {
    if patches.len() != graph.len() || map.num_interfaces() != graph.len() {
        return Err(Error::MissingMesh(patches.len().min(graph.len())));
    }
    let mut rhs = vec![C64::default(); map.dim()];
    let (k1, e1, a1) = (graph.wavenumber(1), graph.epsilon(1), graph.alpha1());
    for (a, iface) in graph.interfaces().iter().enumerate() {
        if iface.from != 1 {
            continue;
        }
        if patches[a].len() != map.interface_size(a) {
            return Err(Error::DimensionMismatch {
                expected: map.interface_size(a),
                got: patches[a].len(),
            });
        }
        let range = map.range(map.row_block_of(EquationKind::BurtonMiller, a));
        for (slot, e) in rhs[range].iter_mut().zip(&patches[a]) {
            let (u, w) = incident_plane_wave(k1, e1, direction, e.centroid, e.normal)?;
            *slot = u + a1 * e1 * w;
        }
    }
    Ok(rhs)
}

/// Expand one scale per column block into a per-column vector.
pub fn expand_block_diagonal(map: &BlockIndexMap, per_block: &[C64]) -> Result<Vec<C64>> {
    if per_block.len() != map.num_blocks() {
        return Err(Error::DimensionMismatch {
            expected: map.num_blocks(),
            got: per_block.len(),
        });
    }
    let mut out = vec![C64::default(); map.dim()];
    for (bc, &s) in per_block.iter().enumerate() {
        out[map.range(bc)].iter_mut().for_each(|v| *v = s);
    }
    Ok(out)
}
