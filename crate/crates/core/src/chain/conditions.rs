//! Block matrices of the rank certificate.
//!
//! Blocks are indexed by the equation offset `ℓ = i − m` inside a window
//! `m..=n` of consecutive equations. The `E` block of offset `ℓ` carries the
//! sign `(−1)^ℓ`; every cell not placed explicitly is zero.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{ChainSystem, Equation};
use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::numlin::BlockGrid;

/// Shape family of a rank equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConditionKind {
    /// `r[A E C] = r[A C]`.
    RowBlock,
    /// `r[B; E; D] = r[B; D]`.
    ColBlock,
    /// `r[[A, E], [0, D]] = r(A) + r(D)`.
    CornerAd,
    /// `r[[B, 0], [E, C]] = r(B) + r(C)`.
    CornerBc,
    /// Staircase opening with an `A` row and closing with an `A`/`C` row.
    StairAa,
    /// Staircase opening with `B` and closing with `D`.
    StairBd,
    /// Staircase opening with an `A` row and closing with `D`.
    StairAd,
    /// Staircase opening with `B` and closing with an `A`/`C` row.
    StairBa,
    /// η-Hermitian `r[A E C] = r[A C]`.
    EtaRowBlock,
    /// η-Hermitian `r[[A, E], [0, C^{η*}]] = r(A) + r(C)`.
    EtaCorner,
    /// η-Hermitian staircase closing with an `A`/`C` row.
    EtaStair,
    /// η-Hermitian staircase closing with `C^{η*}`.
    EtaStairClosed,
}

impl ConditionKind {
    pub const SINGLE: [ConditionKind; 4] = [
        ConditionKind::RowBlock,
        ConditionKind::ColBlock,
        ConditionKind::CornerAd,
        ConditionKind::CornerBc,
    ];
    pub const STAIRS: [ConditionKind; 4] = [
        ConditionKind::StairAa,
        ConditionKind::StairBd,
        ConditionKind::StairAd,
        ConditionKind::StairBa,
    ];
    pub const ETA_SINGLE: [ConditionKind; 2] = [ConditionKind::EtaRowBlock, ConditionKind::EtaCorner];
    pub const ETA_STAIRS: [ConditionKind; 2] = [ConditionKind::EtaStair, ConditionKind::EtaStairClosed];

    pub fn name(self) -> &'static str {
        match self {
            ConditionKind::RowBlock => "row_block",
            ConditionKind::ColBlock => "col_block",
            ConditionKind::CornerAd => "corner_ad",
            ConditionKind::CornerBc => "corner_bc",
            ConditionKind::StairAa => "stair_aa",
            ConditionKind::StairBd => "stair_bd",
            ConditionKind::StairAd => "stair_ad",
            ConditionKind::StairBa => "stair_ba",
            ConditionKind::EtaRowBlock => "eta_row_block",
            ConditionKind::EtaCorner => "eta_corner",
            ConditionKind::EtaStair => "eta_stair",
            ConditionKind::EtaStairClosed => "eta_stair_closed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::SINGLE
            .iter()
            .chain(&Self::STAIRS)
            .chain(&Self::ETA_SINGLE)
            .chain(&Self::ETA_STAIRS)
            .copied()
            .find(|k| k.name() == s)
    }

    /// Whether the condition is indexed by a pair `m < n` rather than a
    /// single equation.
    pub fn is_pair(self) -> bool {
        matches!(
            self,
            ConditionKind::StairAa
                | ConditionKind::StairBd
                | ConditionKind::StairAd
                | ConditionKind::StairBa
                | ConditionKind::EtaStair
                | ConditionKind::EtaStairClosed
        )
    }
}

/// A condition kind with its equation window, 1-based and inclusive.
/// Single-equation kinds have `first == last`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ConditionId {
    pub kind: ConditionKind,
    pub first: usize,
    pub last: usize,
}

impl ConditionId {
    pub fn single(kind: ConditionKind, i: usize) -> Self {
        Self {
            kind,
            first: i,
            last: i,
        }
    }

    pub fn pair(kind: ConditionKind, m: usize, n: usize) -> Self {
        Self {
            kind,
            first: m,
            last: n,
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind.is_pair() {
            write!(f, "{}[{},{}]", self.kind.name(), self.first, self.last)
        } else {
            write!(f, "{}[{}]", self.kind.name(), self.first)
        }
    }
}

/// All `2k(k+1)` conditions of the chain certificate: four per equation,
/// then four per window `m < n`.
pub fn conditions(k: usize) -> Vec<ConditionId> {
    let mut ids = Vec::with_capacity(2 * k * (k + 1));
    for i in 1..=k {
        ids.extend(ConditionKind::SINGLE.iter().map(|&kind| ConditionId::single(kind, i)));
    }
    for m in 1..=k {
        for n in (m + 1)..=k {
            ids.extend(ConditionKind::STAIRS.iter().map(|&kind| ConditionId::pair(kind, m, n)));
        }
    }
    ids
}

/// The `k(k+1)` conditions of the η-Hermitian certificate: two per
/// equation, then two per window `m < n`.
pub fn eta_conditions(k: usize) -> Vec<ConditionId> {
    let mut ids = Vec::with_capacity(k * (k + 1));
    for i in 1..=k {
        ids.extend(
            ConditionKind::ETA_SINGLE
                .iter()
                .map(|&kind| ConditionId::single(kind, i)),
        );
    }
    for m in 1..=k {
        for n in (m + 1)..=k {
            ids.extend(
                ConditionKind::ETA_STAIRS
                    .iter()
                    .map(|&kind| ConditionId::pair(kind, m, n)),
            );
        }
    }
    ids
}

/// Materializes the left-hand block matrix and the right-hand parts whose
/// ranks are summed.
pub fn build_condition(system: &ChainSystem, id: ConditionId) -> Result<(QMatrix, Vec<QMatrix>)> {
    build(system.equations(), id)
}

pub(crate) fn build(eqs: &[Equation], id: ConditionId) -> Result<(QMatrix, Vec<QMatrix>)> {
    let k = eqs.len();
    let valid_pair = id.first >= 1
        && id.last <= k
        && (if id.kind.is_pair() {
            id.first < id.last
        } else {
            id.first == id.last
        });
    if !valid_pair {
        return Err(Error::Dim(alloc::format!("condition {id} is out of range for k = {k}")));
    }
    let w = Window {
        eqs,
        m: id.first - 1,
        n: id.last - 1,
    };
    let out = match id.kind {
        ConditionKind::RowBlock | ConditionKind::StairAa => (w.stair_aa()?, vec![w.ac_full()?, w.db_open()?]),
        ConditionKind::ColBlock | ConditionKind::StairBd => (w.stair_bd()?, vec![w.ca_trunc()?, w.bd_closed()?]),
        ConditionKind::CornerAd | ConditionKind::StairAd => (w.stair_ad()?, vec![w.ac_trunc()?, w.db_closed()?]),
        ConditionKind::CornerBc | ConditionKind::StairBa => (w.stair_ba()?, vec![w.ca_full()?, w.bd_open()?]),
        ConditionKind::EtaRowBlock => (w.stair_aa()?, vec![w.ac_full()?]),
        ConditionKind::EtaCorner => (w.stair_ad()?, vec![eqs[w.m].a.clone(), eqs[w.m].c.clone()]),
        ConditionKind::EtaStair => (w.stair_aa()?, vec![w.ac_full()?, w.ca_trunc()?]),
        ConditionKind::EtaStairClosed => (w.stair_ad()?, vec![w.ac_trunc()?, w.ca_full()?]),
    };
    Ok(out)
}

struct Window<'a> {
    eqs: &'a [Equation],
    m: usize,
    n: usize,
}

impl Window<'_> {
    fn len(&self) -> usize {
        self.n - self.m
    }

    fn eq(&self, l: usize) -> &Equation {
        &self.eqs[self.m + l]
    }

    fn p(&self, l: usize) -> usize {
        self.eq(l).a.rows()
    }
    fn q(&self, l: usize) -> usize {
        self.eq(l).a.cols()
    }
    fn r(&self, l: usize) -> usize {
        self.eq(l).b.rows()
    }
    fn s(&self, l: usize) -> usize {
        self.eq(l).b.cols()
    }
    fn t(&self, l: usize) -> usize {
        self.eq(l).c.cols()
    }
    fn u(&self, l: usize) -> usize {
        self.eq(l).d.rows()
    }

    fn signed_e(&self, l: usize) -> QMatrix {
        if l.is_multiple_of(2) {
            self.eq(l).e.clone()
        } else {
            self.eq(l).e.neg()
        }
    }

    /// Rows `A_m E_m C_m / D_m · B_{m+1} / A_{m+1} −E_{m+1} C_{m+1} / …`
    /// over column bands `q_m, s_m, t_m, s_{m+1}, t_{m+1}, …`.
    /// `close_with_d` appends the `D_n` row and drops the `C_n` column.
    fn a_led(&self, close_with_d: bool) -> Result<QMatrix> {
        let len = self.len();
        let mut heights = Vec::new();
        let mut widths = vec![self.q(0)];
        for l in 0..=len {
            heights.push(self.p(l));
            if l < len || close_with_d {
                heights.push(self.u(l));
            }
            widths.push(self.s(l));
            if l < len || !close_with_d {
                widths.push(self.t(l));
            }
        }
        let mut g = BlockGrid::new(heights, widths);
        for l in 0..=len {
            let eq = self.eq(l);
            let (row, col) = (2 * l, 2 * l);
            g.set(row, col, eq.a.clone());
            g.set(row, col + 1, self.signed_e(l));
            if l < len || !close_with_d {
                g.set(row, col + 2, eq.c.clone());
            }
            if l < len || close_with_d {
                g.set(row + 1, col + 1, eq.d.clone());
            }
            if l < len {
                g.set(row + 1, col + 3, self.eq(l + 1).b.clone());
            }
        }
        g.assemble()
    }

    /// Rows `B_m / E_m C_m / D_m · B_{m+1} / · A_{m+1} −E_{m+1} C_{m+1} / …`
    /// over column bands `s_m, t_m, s_{m+1}, t_{m+1}, …`.
    /// `close_with_d` ends on the `D_n` row without a `C_n` column.
    fn b_led(&self, close_with_d: bool) -> Result<QMatrix> {
        let len = self.len();
        let mut heights = vec![self.r(0)];
        let mut widths = Vec::new();
        for l in 0..=len {
            heights.push(self.p(l));
            if l < len || close_with_d {
                heights.push(self.u(l));
            }
            widths.push(self.s(l));
            if l < len || !close_with_d {
                widths.push(self.t(l));
            }
        }
        let mut g = BlockGrid::new(heights, widths);
        g.set(0, 0, self.eq(0).b.clone());
        for l in 0..=len {
            let eq = self.eq(l);
            let (row, col) = (1 + 2 * l, 2 * l);
            if l > 0 {
                g.set(row, col - 1, eq.a.clone());
            }
            g.set(row, col, self.signed_e(l));
            if l < len || !close_with_d {
                g.set(row, col + 1, eq.c.clone());
            }
            if l < len || close_with_d {
                g.set(row + 1, col, eq.d.clone());
            }
            if l < len {
                g.set(row + 1, col + 2, self.eq(l + 1).b.clone());
            }
        }
        g.assemble()
    }

    fn stair_aa(&self) -> Result<QMatrix> {
        self.a_led(false)
    }

    fn stair_ad(&self) -> Result<QMatrix> {
        self.a_led(true)
    }

    fn stair_bd(&self) -> Result<QMatrix> {
        self.b_led(true)
    }

    fn stair_ba(&self) -> Result<QMatrix> {
        self.b_led(false)
    }

    /// `[A_m C_m; A_{m+1} C_{m+1}; …]` with `A_i` on the diagonal; the final
    /// `C_n` is kept only when `with_last_c`.
    fn ac(&self, with_last_c: bool) -> Result<QMatrix> {
        let len = self.len();
        let heights = (0..=len).map(|l| self.p(l)).collect();
        let mut widths = vec![self.q(0)];
        widths.extend((0..=len).filter(|&l| l < len || with_last_c).map(|l| self.t(l)));
        let mut g = BlockGrid::new(heights, widths);
        for l in 0..=len {
            g.set(l, l, self.eq(l).a.clone());
            if l < len || with_last_c {
                g.set(l, l + 1, self.eq(l).c.clone());
            }
        }
        g.assemble()
    }

    /// `[C_m; A_{m+1} C_{m+1}; …]` with `C_i` on the diagonal and `A_{i}`
    /// to its left; the final `C_n` is kept only when `with_last_c`.
    fn ca(&self, with_last_c: bool) -> Result<QMatrix> {
        let len = self.len();
        let heights = (0..=len).map(|l| self.p(l)).collect();
        let widths = (0..=len)
            .filter(|&l| l < len || with_last_c)
            .map(|l| self.t(l))
            .collect();
        let mut g = BlockGrid::new(heights, widths);
        for l in 0..=len {
            if l < len || with_last_c {
                g.set(l, l, self.eq(l).c.clone());
            }
            if l > 0 {
                g.set(l, l - 1, self.eq(l).a.clone());
            }
        }
        g.assemble()
    }

    /// `[D_m B_{m+1}; D_{m+1} B_{m+2}; …]`; the final `D_n` row only when
    /// `with_last_d`.
    fn db(&self, with_last_d: bool) -> Result<QMatrix> {
        let len = self.len();
        let heights = (0..=len)
            .filter(|&l| l < len || with_last_d)
            .map(|l| self.u(l))
            .collect();
        let widths = (0..=len).map(|l| self.s(l)).collect();
        let mut g = BlockGrid::new(heights, widths);
        for l in 0..=len {
            if l < len || with_last_d {
                g.set(l, l, self.eq(l).d.clone());
            }
            if l < len {
                g.set(l, l + 1, self.eq(l + 1).b.clone());
            }
        }
        g.assemble()
    }

    /// `[B_m; D_m B_{m+1}; D_{m+1} B_{m+2}; …]`; the final `D_n` row only
    /// when `with_last_d`.
    fn bd(&self, with_last_d: bool) -> Result<QMatrix> {
        let len = self.len();
        let mut heights = vec![self.r(0)];
        heights.extend((0..=len).filter(|&l| l < len || with_last_d).map(|l| self.u(l)));
        let widths = (0..=len).map(|l| self.s(l)).collect();
        let mut g = BlockGrid::new(heights, widths);
        g.set(0, 0, self.eq(0).b.clone());
        for l in 0..=len {
            if l < len || with_last_d {
                g.set(l + 1, l, self.eq(l).d.clone());
            }
            if l < len {
                g.set(l + 1, l + 1, self.eq(l + 1).b.clone());
            }
        }
        g.assemble()
    }

    fn ac_full(&self) -> Result<QMatrix> {
        self.ac(true)
    }
    fn ac_trunc(&self) -> Result<QMatrix> {
        self.ac(false)
    }
    fn ca_full(&self) -> Result<QMatrix> {
        self.ca(true)
    }
    fn ca_trunc(&self) -> Result<QMatrix> {
        self.ca(false)
    }
    fn db_open(&self) -> Result<QMatrix> {
        self.db(false)
    }
    fn db_closed(&self) -> Result<QMatrix> {
        self.db(true)
    }
    fn bd_open(&self) -> Result<QMatrix> {
        self.bd(false)
    }
    fn bd_closed(&self) -> Result<QMatrix> {
        self.bd(true)
    }
}
