//! Addition/shift-only evaluation plans for dyadic transform matrices.
//!
//! A [`FlowGraphPlan`] is a straight-line program: every node combines
//! inputs or earlier nodes with one add, subtract, negate or shift. Negation
//! and passthrough are free, matching the usual counting convention for
//! multiplierless transforms. Plans evaluate over any [`PlanValue`]; with
//! [`Dyadic`] values the result is exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::Serialize;

use crate::dyadic::{Dyadic, DyadicMatrix};
use crate::error::{Error, Result};
use crate::matrix::{Family, TransformSpec, N};

/// Multiplication, addition and shift counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct OpCount {
    pub mults: u64,
    pub adds: u64,
    pub shifts: u64,
}

impl OpCount {
    pub const fn new(mults: u64, adds: u64, shifts: u64) -> Self {
        OpCount { mults, adds, shifts }
    }

    pub fn scaled(self, factor: u64) -> Self {
        OpCount::new(self.mults * factor, self.adds * factor, self.shifts * factor)
    }

    pub fn total(self) -> u64 {
        self.mults + self.adds + self.shifts
    }
}

impl Add for OpCount {
    type Output = OpCount;
    fn add(self, rhs: OpCount) -> OpCount {
        OpCount::new(self.mults + rhs.mults, self.adds + rhs.adds, self.shifts + rhs.shifts)
    }
}

impl fmt::Display for OpCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.mults, self.adds, self.shifts)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operand {
    Input(usize),
    Node(usize),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Input(i) => write!(f, "x{i}"),
            Operand::Node(i) => write!(f, "n{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Add(Operand, Operand),
    Sub(Operand, Operand),
    Neg(Operand),
    Shr(Operand, u32),
    Shl(Operand, u32),
    Pass(Operand),
    Zero,
}

impl Op {
    fn operands(&self) -> impl Iterator<Item = Operand> {
        let (a, b) = match *self {
            Op::Add(a, b) | Op::Sub(a, b) => (Some(a), Some(b)),
            Op::Neg(a) | Op::Shr(a, _) | Op::Shl(a, _) | Op::Pass(a) => (Some(a), None),
            Op::Zero => (None, None),
        };
        a.into_iter().chain(b)
    }

    fn map_operands(self, f: impl Fn(Operand) -> Operand) -> Op {
        match self {
            Op::Add(a, b) => Op::Add(f(a), f(b)),
            Op::Sub(a, b) => Op::Sub(f(a), f(b)),
            Op::Neg(a) => Op::Neg(f(a)),
            Op::Shr(a, s) => Op::Shr(f(a), s),
            Op::Shl(a, s) => Op::Shl(f(a), s),
            Op::Pass(a) => Op::Pass(f(a)),
            Op::Zero => Op::Zero,
        }
    }

    fn cost(&self) -> OpCount {
        match self {
            Op::Add(..) | Op::Sub(..) => OpCount::new(0, 1, 0),
            Op::Shr(..) | Op::Shl(..) => OpCount::new(0, 0, 1),
            Op::Neg(_) | Op::Pass(_) | Op::Zero => OpCount::default(),
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Add(a, b) => write!(f, "add {a} {b}"),
            Op::Sub(a, b) => write!(f, "sub {a} {b}"),
            Op::Neg(a) => write!(f, "neg {a}"),
            Op::Shr(a, s) => write!(f, "shr {a} {s}"),
            Op::Shl(a, s) => write!(f, "shl {a} {s}"),
            Op::Pass(a) => write!(f, "pass {a}"),
            Op::Zero => write!(f, "zero"),
        }
    }
}

/// Values a plan can be evaluated over.
pub trait PlanValue: Copy + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> {
    fn zero() -> Self;
    fn shr(self, bits: u32) -> Self;
    fn shl(self, bits: u32) -> Self;
}

impl PlanValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn shr(self, bits: u32) -> Self {
        self / (1u64 << bits) as f64
    }
    fn shl(self, bits: u32) -> Self {
        self * (1u64 << bits) as f64
    }
}

impl PlanValue for Dyadic {
    fn zero() -> Self {
        Dyadic::ZERO
    }
    fn shr(self, bits: u32) -> Self {
        self.halve(bits)
    }
    fn shl(self, bits: u32) -> Self {
        self.double(bits)
    }
}

/// Straight-line add/shift program computing a dyadic matrix-vector product.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlowGraphPlan {
    input_arity: usize,
    nodes: Vec<Op>,
    outputs: Vec<usize>,
}

impl FlowGraphPlan {
    /// Validates that every node only references inputs or earlier nodes.
    pub fn new(input_arity: usize, nodes: Vec<Op>, outputs: Vec<usize>) -> Result<Self> {
        for (i, op) in nodes.iter().enumerate() {
            for r in op.operands() {
                match r {
                    Operand::Input(j) if j >= input_arity => {
                        return Err(Error::InvalidPlan(format!("n{i} reads missing input x{j}")))
                    }
                    Operand::Node(j) if j >= i => {
                        return Err(Error::InvalidPlan(format!("n{i} reads n{j}, not computed yet")))
                    }
                    _ => {}
                }
            }
        }
        if let Some(&o) = outputs.iter().find(|&&o| o >= nodes.len()) {
            return Err(Error::InvalidPlan(format!("output refers to missing node n{o}")));
        }
        Ok(FlowGraphPlan { input_arity, nodes, outputs })
    }

    pub fn input_arity(&self) -> usize {
        self.input_arity
    }

    pub fn output_arity(&self) -> usize {
        self.outputs.len()
    }

    pub fn nodes(&self) -> &[Op] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn op_count(&self) -> OpCount {
        self.nodes.iter().fold(OpCount::default(), |acc, op| acc + op.cost())
    }

    pub fn evaluate<T: PlanValue>(&self, x: &[T]) -> Result<Vec<T>> {
        let mut scratch = Vec::with_capacity(self.nodes.len());
        let mut out = vec![T::zero(); self.outputs.len()];
        self.evaluate_into(x, &mut scratch, &mut out)?;
        Ok(out)
    }

    /// Allocation-free evaluation; `scratch` is reused between calls.
    pub fn evaluate_into<T: PlanValue>(&self, x: &[T], scratch: &mut Vec<T>, out: &mut [T]) -> Result<()> {
        if x.len() != self.input_arity {
            return Err(Error::Dimension { expected: self.input_arity, actual: x.len() });
        }
        if out.len() != self.outputs.len() {
            return Err(Error::Dimension { expected: self.outputs.len(), actual: out.len() });
        }
        scratch.clear();
        for op in &self.nodes {
            let v = |r: Operand| match r {
                Operand::Input(i) => x[i],
                Operand::Node(i) => scratch[i],
            };
            let value = match *op {
                Op::Add(a, b) => v(a) + v(b),
                Op::Sub(a, b) => v(a) - v(b),
                Op::Neg(a) => -v(a),
                Op::Shr(a, s) => v(a).shr(s),
                Op::Shl(a, s) => v(a).shl(s),
                Op::Pass(a) => v(a),
                Op::Zero => T::zero(),
            };
            scratch.push(value);
        }
        for (o, &idx) in out.iter_mut().zip(&self.outputs) {
            *o = scratch[idx];
        }
        Ok(())
    }

    /// The matrix this plan computes, recovered exactly from unit inputs.
    pub fn matrix(&self) -> DyadicMatrix {
        let rows = self.outputs.len();
        let cols = self.input_arity;
        let mut entries = vec![Dyadic::ZERO; rows * cols];
        let mut e = vec![Dyadic::ZERO; cols];
        for c in 0..cols {
            e.fill(Dyadic::ZERO);
            e[c] = Dyadic::ONE;
            let col = self.evaluate(&e).expect("arity matches");
            for (r, v) in col.into_iter().enumerate() {
                entries[r * cols + c] = v;
            }
        }
        DyadicMatrix::new(rows, cols, entries).expect("plan has outputs")
    }

    /// Keeps the first `k` outputs and drops every node they do not need.
    pub fn retain_outputs(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.outputs.len() {
            return Err(Error::PruneRange(k));
        }
        let mut live = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = self.outputs[..k].to_vec();
        while let Some(i) = stack.pop() {
            if live[i] {
                continue;
            }
            live[i] = true;
            for r in self.nodes[i].operands() {
                if let Operand::Node(j) = r {
                    stack.push(j);
                }
            }
        }
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, op) in self.nodes.iter().enumerate() {
            if live[i] {
                remap[i] = nodes.len();
                nodes.push(op.map_operands(|r| match r {
                    Operand::Node(j) => Operand::Node(remap[j]),
                    input => input,
                }));
            }
        }
        let outputs = self.outputs[..k].iter().map(|&o| remap[o]).collect();
        FlowGraphPlan::new(self.input_arity, nodes, outputs)
    }

    /// Text listing, one node per line as `n<k>: <op> <ref> <ref>`, then the
    /// output list.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (i, op) in self.nodes.iter().enumerate() {
            s.push_str(&format!("n{i}: {op}\n"));
        }
        let outs: Vec<String> = self.outputs.iter().map(|o| format!("n{o}")).collect();
        s.push_str(&format!("out: {}\n", outs.join(" ")));
        s
    }
}

impl fmt::Display for FlowGraphPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

/// Incremental construction of a [`FlowGraphPlan`].
#[derive(Debug)]
pub struct PlanBuilder {
    input_arity: usize,
    nodes: Vec<Op>,
}

impl PlanBuilder {
    pub fn new(input_arity: usize) -> Self {
        PlanBuilder { input_arity, nodes: Vec::new() }
    }

    pub fn x(&self, i: usize) -> Operand {
        assert!(i < self.input_arity, "input x{i} out of range");
        Operand::Input(i)
    }

    fn push(&mut self, op: Op) -> Operand {
        self.nodes.push(op);
        Operand::Node(self.nodes.len() - 1)
    }

    pub fn add(&mut self, a: Operand, b: Operand) -> Operand {
        self.push(Op::Add(a, b))
    }

    pub fn sub(&mut self, a: Operand, b: Operand) -> Operand {
        self.push(Op::Sub(a, b))
    }

    pub fn neg(&mut self, a: Operand) -> Operand {
        self.push(Op::Neg(a))
    }

    pub fn shr(&mut self, a: Operand, bits: u32) -> Operand {
        self.push(Op::Shr(a, bits))
    }

    pub fn shl(&mut self, a: Operand, bits: u32) -> Operand {
        self.push(Op::Shl(a, bits))
    }

    pub fn zero(&mut self) -> Operand {
        self.push(Op::Zero)
    }

    /// Outputs that name an input directly become passthrough nodes.
    pub fn finish(mut self, outputs: &[Operand]) -> FlowGraphPlan {
        let outputs = outputs
            .iter()
            .map(|&o| match o {
                Operand::Node(i) => i,
                Operand::Input(_) => {
                    self.nodes.push(Op::Pass(o));
                    self.nodes.len() - 1
                }
            })
            .collect();
        FlowGraphPlan::new(self.input_arity, self.nodes, outputs).expect("builder emits valid plans")
    }

    /// Inputs `x_n ± x_{7-n}` for `n < 4`.
    fn butterflies(&mut self) -> ([Operand; 4], [Operand; 4]) {
        let sums = std::array::from_fn(|n| self.add(self.x(n), self.x(7 - n)));
        let diffs = std::array::from_fn(|n| self.sub(self.x(n), self.x(7 - n)));
        (sums, diffs)
    }
}

/// Pruned LODCT `W⟨4⟩`: 18 additions and 1 shift.
pub fn plan_w4() -> FlowGraphPlan {
    let mut p = PlanBuilder::new(N);
    let a: Vec<Operand> = (0..4).map(|n| p.add(p.x(n), p.x(7 - n))).collect();
    let c0 = p.add(a[0], a[3]);
    let c1 = p.add(a[1], a[2]);
    let row0 = p.add(c0, c1);
    let b: Vec<Operand> = (0..4).map(|n| p.sub(p.x(n), p.x(7 - n))).collect();
    let b01 = p.add(b[0], b[1]);
    let row1 = p.add(b01, b[2]);
    let d0 = p.sub(a[0], a[3]);
    let d1 = p.sub(a[1], a[2]);
    let half_d1 = p.shr(d1, 1);
    let row2 = p.add(d0, half_d1);
    let b02 = p.sub(b[0], b[2]);
    let row3 = p.sub(b02, b[3]);
    p.finish(&[row0, row1, row2, row3])
}

/// Pruned MRDCT `M⟨6⟩`: 12 additions.
pub fn plan_m6() -> FlowGraphPlan {
    let mut p = PlanBuilder::new(N);
    let a: Vec<Operand> = (0..4).map(|n| p.add(p.x(n), p.x(7 - n))).collect();
    let row1 = p.sub(p.x(0), p.x(7));
    let row3 = p.sub(p.x(5), p.x(2));
    let row5 = p.sub(p.x(6), p.x(1));
    let c0 = p.add(a[0], a[3]);
    let c1 = p.add(a[1], a[2]);
    let row0 = p.add(c0, c1);
    let row2 = p.sub(a[0], a[3]);
    let row4 = p.sub(c0, c1);
    p.finish(&[row0, row1, row2, row3, row4, row5])
}

/// Full LODCT `W`: 24 additions and 2 shifts.
pub fn plan_lodct() -> FlowGraphPlan {
    let mut p = PlanBuilder::new(N);
    let (a, b) = p.butterflies();
    let c0 = p.add(a[0], a[3]);
    let c1 = p.add(a[1], a[2]);
    let d0 = p.sub(a[0], a[3]);
    let d1 = p.sub(a[1], a[2]);
    let r0 = p.add(c0, c1);
    let r4 = p.sub(c0, c1);
    let half_d1 = p.shr(d1, 1);
    let r2 = p.add(d0, half_d1);
    let half_d0 = p.shr(d0, 1);
    let r6 = p.sub(half_d0, d1);
    let (r1, r3, r5, r7) = odd_rows_w(&mut p, &b);
    p.finish(&[r0, r1, r2, r3, r4, r5, r6, r7])
}

/// Odd rows shared by LODCT and RDCT, 8 additions on the differences.
fn odd_rows_w(p: &mut PlanBuilder, b: &[Operand; 4]) -> (Operand, Operand, Operand, Operand) {
    let t = p.add(b[0], b[1]);
    let r1 = p.add(t, b[2]);
    let t = p.sub(b[0], b[2]);
    let r3 = p.sub(t, b[3]);
    let t = p.sub(b[0], b[1]);
    let r5 = p.add(t, b[3]);
    let t = p.sub(b[2], b[1]);
    let r7 = p.sub(t, b[3]);
    (r1, r3, r5, r7)
}

/// Full MRDCT `M`: 14 additions.
pub fn plan_mrdct() -> FlowGraphPlan {
    let mut p = PlanBuilder::new(N);
    let a: Vec<Operand> = (0..4).map(|n| p.add(p.x(n), p.x(7 - n))).collect();
    let c0 = p.add(a[0], a[3]);
    let c1 = p.add(a[1], a[2]);
    let r0 = p.add(c0, c1);
    let r1 = p.sub(p.x(0), p.x(7));
    let r2 = p.sub(a[0], a[3]);
    let r3 = p.sub(p.x(5), p.x(2));
    let r4 = p.sub(c0, c1);
    let r5 = p.sub(p.x(6), p.x(1));
    let r6 = p.sub(a[2], a[1]);
    let r7 = p.sub(p.x(4), p.x(3));
    p.finish(&[r0, r1, r2, r3, r4, r5, r6, r7])
}

/// Signed DCT: 24 additions.
pub fn plan_sdct() -> FlowGraphPlan {
    let mut p = PlanBuilder::new(N);
    let (a, b) = p.butterflies();
    let c0 = p.add(a[0], a[3]);
    let c1 = p.add(a[1], a[2]);
    let d0 = p.sub(a[0], a[3]);
    let d1 = p.sub(a[1], a[2]);
    let r0 = p.add(c0, c1);
    let r4 = p.sub(c0, c1);
    let r2 = p.add(d0, d1);
    let r6 = p.sub(d0, d1);
    let e0 = p.add(b[0], b[1]);
    let e1 = p.sub(b[0], b[1]);
    let f0 = p.add(b[2], b[3]);
    let f1 = p.sub(b[2], b[3]);
    let r1 = p.add(e0, f0);
    let r3 = p.sub(e1, f0);
    let r5 = p.add(e1, f0);
    let r7 = p.add(e1, f1);
    p.finish(&[r0, r1, r2, r3, r4, r5, r6, r7])
}

/// Rounded DCT: 22 additions.
pub fn plan_rdct() -> FlowGraphPlan {
    let mut p = PlanBuilder::new(N);
    let (a, b) = p.butterflies();
    let c0 = p.add(a[0], a[3]);
    let c1 = p.add(a[1], a[2]);
    let r0 = p.add(c0, c1);
    let r4 = p.sub(c0, c1);
    let r2 = p.sub(a[0], a[3]);
    let r6 = p.sub(a[2], a[1]);
    let (r1, r3, r5, r7) = odd_rows_w(&mut p, &b);
    p.finish(&[r0, r1, r2, r3, r4, r5, r6, r7])
}

/// A correct, not necessarily minimal, plan for any dyadic matrix.
///
/// When every row is symmetric or antisymmetric about its midpoint the
/// input butterflies `x_n ± x_{c-1-n}` are shared across rows. Each row is
/// then summed term by term, with terms grouped by power of two so that one
/// shift serves the whole group.
pub fn plan_generic(matrix: &DyadicMatrix) -> FlowGraphPlan {
    let cols = matrix.cols();
    let mut p = PlanBuilder::new(cols);
    let half = cols / 2;

    let parity: Option<Vec<bool>> = if cols.is_multiple_of(2) {
        matrix
            .row_iter()
            .map(|r| {
                if (0..half).all(|n| r[n] == r[cols - 1 - n]) {
                    Some(true)
                } else if (0..half).all(|n| r[n] == -r[cols - 1 - n]) {
                    Some(false)
                } else {
                    None
                }
            })
            .collect()
    } else {
        None
    };

    let row_terms: Vec<Vec<(Dyadic, Operand)>> = match parity {
        Some(symmetric) => {
            let mut sums: Vec<Option<Operand>> = vec![None; half];
            let mut diffs: Vec<Option<Operand>> = vec![None; half];
            matrix
                .row_iter()
                .zip(symmetric)
                .map(|(r, sym)| {
                    (0..half)
                        .filter(|&n| !r[n].is_zero())
                        .map(|n| {
                            let cache = if sym { &mut sums } else { &mut diffs };
                            let op = *cache[n].get_or_insert_with(|| {
                                let (a, b) = (p.x(n), p.x(cols - 1 - n));
                                if sym {
                                    p.add(a, b)
                                } else {
                                    p.sub(a, b)
                                }
                            });
                            (r[n], op)
                        })
                        .collect()
                })
                .collect()
        }
        None => matrix
            .row_iter()
            .map(|r| r.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(n, &c)| (c, p.x(n))).collect())
            .collect(),
    };

    let outputs: Vec<Operand> = row_terms.into_iter().map(|t| linear_combination(&mut p, t)).collect();
    p.finish(&outputs)
}

/// Emits `Σ c_i · v_i` using adds, subtracts and shifts only.
fn linear_combination(p: &mut PlanBuilder, terms: Vec<(Dyadic, Operand)>) -> Operand {
    // exponent -> signed operands with coefficient ±2^exponent
    let mut groups: BTreeMap<i64, Vec<(bool, Operand)>> = BTreeMap::new();
    for (c, v) in terms {
        let negative = c.signum() < 0;
        let mag = c.numerator().unsigned_abs();
        for bit in 0..64 {
            if mag >> bit & 1 == 1 {
                let exp = bit as i64 - c.den_log2() as i64;
                groups.entry(exp).or_default().push((negative, v));
            }
        }
    }
    if groups.is_empty() {
        return p.zero();
    }
    let mut shifted = Vec::with_capacity(groups.len());
    for (exp, members) in groups {
        let (mut v, negative) = signed_sum(p, members);
        if exp < 0 {
            v = p.shr(v, (-exp) as u32);
        } else if exp > 0 {
            v = p.shl(v, exp as u32);
        }
        shifted.push((negative, v));
    }
    let (v, negative) = signed_sum(p, shifted);
    if negative {
        p.neg(v)
    } else {
        v
    }
}

/// Sums `±v_i`; returns the accumulator and whether it holds the negated sum.
fn signed_sum(p: &mut PlanBuilder, mut terms: Vec<(bool, Operand)>) -> (Operand, bool) {
    let lead = terms.iter().position(|(neg, _)| !neg).unwrap_or(0);
    let (acc_negative, mut acc) = terms.remove(lead);
    for (neg, v) in terms {
        acc = if neg == acc_negative { p.add(acc, v) } else { p.sub(acc, v) };
    }
    (acc, acc_negative)
}

fn full_plan(family: Family) -> Option<FlowGraphPlan> {
    match family {
        Family::Lodct => Some(plan_lodct()),
        Family::Mrdct => Some(plan_mrdct()),
        Family::Sdct => Some(plan_sdct()),
        Family::Rdct => Some(plan_rdct()),
        Family::Custom => None,
    }
}

/// The fast plan used for `spec`: the hand-derived plan of its family,
/// pruned to `prune_k` outputs, or a generic plan when none applies.
pub fn plan_for(spec: &TransformSpec) -> FlowGraphPlan {
    let hand = match (spec.family, spec.prune_k) {
        (Family::Lodct, 4) => Some(plan_w4()),
        (Family::Mrdct, 6) => Some(plan_m6()),
        (family, k) => full_plan(family).and_then(|p| p.retain_outputs(k).ok()),
    };
    match hand {
        Some(plan) if plan.matrix() == spec.matrix => plan,
        _ => plan_generic(&spec.matrix),
    }
}

/// 1-D operation counts of the plan used for `spec`.
pub fn count_ops_1d(spec: &TransformSpec) -> OpCount {
    plan_for(spec).op_count()
}

/// 2-D counts: 8 column passes plus `K` row passes of the 1-D plan.
pub fn count_ops_2d(spec: &TransformSpec) -> OpCount {
    two_d(count_ops_1d(spec), spec.prune_k)
}

/// `(8 + K) · A₁D`, applied to each count independently.
pub fn two_d(one_d: OpCount, prune_k: usize) -> OpCount {
    one_d.scaled((N + prune_k) as u64)
}
