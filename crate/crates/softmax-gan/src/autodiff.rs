//! Reverse-mode automatic differentiation on a flat tape.
//!
//! Graphs are built eagerly: every operation appends a node holding its
//! forward value and the ids of its parents, so node ids are already a
//! topological order. `backward` walks the tape once in reverse,
//! accumulating adjoints additively — a node used several times receives
//! the sum of the gradients flowing back through each use.
//!
//! Reductions (`sum`, `mean`, `log_sum_exp`) treat their input as a flat
//! list of elements regardless of shape. `log_sum_exp` is the only place
//! the loss code exponentiates, so the usual max-shift stabilization lives
//! there and nowhere else.

use crate::error::{contract_err, Error, Result};
use crate::num;
use crate::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NodeId(pub(crate) usize);

#[derive(Clone, Debug)]
enum Op {
    Leaf,
    MatMul(NodeId, NodeId),
    Transpose(NodeId),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    /// Row-broadcast bias add: `(m×n) + [n]`.
    AddBias(NodeId, NodeId),
    Relu(NodeId),
    LeakyRelu(NodeId, f64),
    Tanh(NodeId),
    Exp(NodeId),
    Log(NodeId),
    Neg(NodeId),
    Scale(NodeId, f64),
    Softplus(NodeId),
    Sum(NodeId),
    Mean(NodeId),
    LogSumExp(NodeId),
    Concat(Vec<NodeId>),
    Flatten(NodeId),
}

#[derive(Clone, Debug)]
struct Node {
    op: Op,
    value: Tensor,
}

#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

/// Adjoints produced by [`Tape::backward`], indexed by node id.
pub struct Gradients {
    grads: Vec<Tensor>,
}

impl Gradients {
    /// Gradient of the backward root with respect to the node's value.
    pub fn wrt(&self, id: NodeId) -> &Tensor {
        &self.grads[id.0]
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, id: NodeId) -> &Tensor {
        &self.nodes[id.0].value
    }

    fn push(&mut self, op: Op, value: Tensor) -> NodeId {
        self.nodes.push(Node { op, value });
        NodeId(self.nodes.len() - 1)
    }

    pub fn leaf(&mut self, value: Tensor) -> NodeId {
        self.push(Op::Leaf, value)
    }

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let value = crate::tensor::matmul(self.value(a), self.value(b))?;
        Ok(self.push(Op::MatMul(a, b), value))
    }

    pub fn transpose(&mut self, a: NodeId) -> Result<NodeId> {
        if self.value(a).shape().len() != 2 {
            return Err(contract_err!(
                "transpose expects a matrix, got shape {:?}",
                self.value(a).shape()
            ));
        }
        let value = self.value(a).transposed();
        Ok(self.push(Op::Transpose(a), value))
    }

    fn binary_same_shape(
        &mut self,
        op_name: &'static str,
        a: NodeId,
        b: NodeId,
        f: impl Fn(f64, f64) -> f64,
        op: Op,
    ) -> Result<NodeId> {
        let (va, vb) = (self.value(a), self.value(b));
        if va.shape() != vb.shape() {
            return Err(Error::ShapeMismatch {
                op: op_name,
                left: va.shape().to_vec(),
                right: vb.shape().to_vec(),
            });
        }
        let data = va.data().iter().zip(vb.data()).map(|(&x, &y)| f(x, y)).collect();
        let value = Tensor::new(va.shape().to_vec(), data)?;
        Ok(self.push(op, value))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.binary_same_shape("add", a, b, |x, y| x + y, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.binary_same_shape("sub", a, b, |x, y| x - y, Op::Sub(a, b))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.binary_same_shape("mul", a, b, |x, y| x * y, Op::Mul(a, b))
    }

    /// `x + b` with `b` broadcast over the rows of `x`.
    pub fn add_bias(&mut self, x: NodeId, b: NodeId) -> Result<NodeId> {
        let (vx, vb) = (self.value(x), self.value(b));
        let ok = vx.shape().len() == 2 && vb.shape().len() == 1 && vb.shape()[0] == vx.cols();
        if !ok {
            return Err(Error::ShapeMismatch {
                op: "add_bias",
                left: vx.shape().to_vec(),
                right: vb.shape().to_vec(),
            });
        }
        let n = vx.cols();
        let data = vx
            .data()
            .iter()
            .enumerate()
            .map(|(i, &v)| v + vb.data()[i % n])
            .collect();
        let value = Tensor::new(vx.shape().to_vec(), data)?;
        Ok(self.push(Op::AddBias(x, b), value))
    }

    fn unary(&mut self, a: NodeId, f: impl Fn(f64) -> f64, op: Op) -> NodeId {
        let va = self.value(a);
        let data = va.data().iter().map(|&x| f(x)).collect();
        let value = Tensor::new(va.shape().to_vec(), data).expect("unary preserves shape");
        self.push(op, value)
    }

    pub fn relu(&mut self, a: NodeId) -> NodeId {
        self.unary(a, |x| x.max(0.0), Op::Relu(a))
    }

    /// `x` for `x > 0`, `alpha·x` otherwise.
    pub fn leaky_relu(&mut self, a: NodeId, alpha: f64) -> NodeId {
        self.unary(a, |x| if x > 0.0 { x } else { alpha * x }, Op::LeakyRelu(a, alpha))
    }

    pub fn tanh(&mut self, a: NodeId) -> NodeId {
        self.unary(a, f64::tanh, Op::Tanh(a))
    }

    pub fn exp(&mut self, a: NodeId) -> NodeId {
        self.unary(a, f64::exp, Op::Exp(a))
    }

    /// Natural log; rejects non-positive inputs instead of producing
    /// `-inf`/`NaN` silently.
    pub fn log(&mut self, a: NodeId) -> Result<NodeId> {
        if let Some((index, &value)) = self
            .value(a)
            .data()
            .iter()
            .enumerate()
            .find(|(_, v)| **v <= 0.0 || !v.is_finite())
        {
            return Err(Error::Domain {
                op: "log",
                index,
                value,
            });
        }
        Ok(self.unary(a, f64::ln, Op::Log(a)))
    }

    pub fn neg(&mut self, a: NodeId) -> NodeId {
        self.unary(a, |x| -x, Op::Neg(a))
    }

    pub fn scale(&mut self, a: NodeId, c: f64) -> NodeId {
        self.unary(a, |x| c * x, Op::Scale(a, c))
    }

    pub fn softplus(&mut self, a: NodeId) -> NodeId {
        self.unary(a, num::softplus, Op::Softplus(a))
    }

    pub fn sum(&mut self, a: NodeId) -> NodeId {
        let total: f64 = self.value(a).data().iter().sum();
        self.push(Op::Sum(a), Tensor::scalar(total))
    }

    pub fn mean(&mut self, a: NodeId) -> NodeId {
        let v = self.value(a);
        let m = v.data().iter().sum::<f64>() / v.numel() as f64;
        self.push(Op::Mean(a), Tensor::scalar(m))
    }

    /// `ln Σ exp(x_i)` over all elements, max-shifted for stability.
    pub fn log_sum_exp(&mut self, a: NodeId) -> NodeId {
        let v = num::log_sum_exp(self.value(a).data());
        self.push(Op::LogSumExp(a), Tensor::scalar(v))
    }

    /// Concatenate rank-1 nodes into one vector, in argument order.
    pub fn concat(&mut self, parts: &[NodeId]) -> Result<NodeId> {
        if parts.is_empty() {
            return Err(contract_err!("concat of zero nodes"));
        }
        let mut data = Vec::new();
        for &p in parts {
            let v = self.value(p);
            if v.shape().len() != 1 {
                return Err(contract_err!(
                    "concat expects vectors, got shape {:?}",
                    v.shape()
                ));
            }
            data.extend_from_slice(v.data());
        }
        let value = Tensor::vector(data);
        Ok(self.push(Op::Concat(parts.to_vec()), value))
    }

    /// Reinterpret any node as a rank-1 vector of its elements.
    pub fn flatten(&mut self, a: NodeId) -> NodeId {
        let value = Tensor::vector(self.value(a).data().to_vec());
        self.push(Op::Flatten(a), value)
    }

    /// Reverse sweep from a scalar root. Returns one adjoint per node;
    /// nodes the root does not depend on get zero gradients.
    pub fn backward(&self, root: NodeId) -> Result<Gradients> {
        if !self.value(root).is_scalar() {
            return Err(contract_err!(
                "backward root must be scalar, got shape {:?}",
                self.value(root).shape()
            ));
        }
        let mut grads: Vec<Tensor> = self
            .nodes
            .iter()
            .map(|n| Tensor::zeros(n.value.shape()))
            .collect();
        grads[root.0].data_mut()[0] = 1.0;

        for i in (0..=root.0).rev() {
            let g = grads[i].clone();
            match &self.nodes[i].op {
                Op::Leaf => {}
                Op::MatMul(a, b) => {
                    let va = self.value(*a);
                    let vb = self.value(*b);
                    let (m, k, n) = (va.rows(), va.cols(), vb.cols());
                    acc_grad_matmul_lhs(g.data(), vb.data(), grads[a.0].data_mut(), m, k, n);
                    acc_grad_matmul_rhs(va.data(), g.data(), grads[b.0].data_mut(), m, k, n);
                }
                Op::Transpose(a) => {
                    let gt = g.transposed();
                    add_into(grads[a.0].data_mut(), gt.data());
                }
                Op::Add(a, b) => {
                    add_into(grads[a.0].data_mut(), g.data());
                    add_into(grads[b.0].data_mut(), g.data());
                }
                Op::Sub(a, b) => {
                    add_into(grads[a.0].data_mut(), g.data());
                    sub_into(grads[b.0].data_mut(), g.data());
                }
                Op::Mul(a, b) => {
                    let (va, vb) = (self.value(*a).clone(), self.value(*b).clone());
                    acc_scaled(grads[a.0].data_mut(), g.data(), vb.data());
                    acc_scaled(grads[b.0].data_mut(), g.data(), va.data());
                }
                Op::AddBias(x, b) => {
                    add_into(grads[x.0].data_mut(), g.data());
                    let n = self.value(*b).numel();
                    let gb = grads[b.0].data_mut();
                    for (idx, &gv) in g.data().iter().enumerate() {
                        gb[idx % n] += gv;
                    }
                }
                Op::Relu(a) => {
                    let va = self.value(*a).clone();
                    let ga = grads[a.0].data_mut();
                    for ((gd, &gv), &x) in ga.iter_mut().zip(g.data()).zip(va.data()) {
                        if x > 0.0 {
                            *gd += gv;
                        }
                    }
                }
                Op::LeakyRelu(a, alpha) => {
                    let va = self.value(*a).clone();
                    let ga = grads[a.0].data_mut();
                    for ((gd, &gv), &x) in ga.iter_mut().zip(g.data()).zip(va.data()) {
                        *gd += if x > 0.0 { gv } else { alpha * gv };
                    }
                }
                Op::Tanh(a) => {
                    let y = self.value(i_node(i)).clone();
                    let ga = grads[a.0].data_mut();
                    for ((gd, &gv), &yv) in ga.iter_mut().zip(g.data()).zip(y.data()) {
                        *gd += gv * (1.0 - yv * yv);
                    }
                }
                Op::Exp(a) => {
                    let y = self.value(i_node(i)).clone();
                    acc_scaled(grads[a.0].data_mut(), g.data(), y.data());
                }
                Op::Log(a) => {
                    let va = self.value(*a).clone();
                    let ga = grads[a.0].data_mut();
                    for ((gd, &gv), &x) in ga.iter_mut().zip(g.data()).zip(va.data()) {
                        *gd += gv / x;
                    }
                }
                Op::Neg(a) => {
                    sub_into(grads[a.0].data_mut(), g.data());
                }
                Op::Scale(a, c) => {
                    let c = *c;
                    let ga = grads[a.0].data_mut();
                    for (gd, &gv) in ga.iter_mut().zip(g.data()) {
                        *gd += c * gv;
                    }
                }
                Op::Softplus(a) => {
                    let va = self.value(*a).clone();
                    let ga = grads[a.0].data_mut();
                    for ((gd, &gv), &x) in ga.iter_mut().zip(g.data()).zip(va.data()) {
                        *gd += gv * num::sigmoid(x);
                    }
                }
                Op::Sum(a) => {
                    let gv = g.scalar_value();
                    for gd in grads[a.0].data_mut() {
                        *gd += gv;
                    }
                }
                Op::Mean(a) => {
                    let n = self.value(*a).numel() as f64;
                    let gv = g.scalar_value() / n;
                    for gd in grads[a.0].data_mut() {
                        *gd += gv;
                    }
                }
                Op::LogSumExp(a) => {
                    let gv = g.scalar_value();
                    let sm = num::softmax(self.value(*a).data());
                    let ga = grads[a.0].data_mut();
                    for (gd, &p) in ga.iter_mut().zip(&sm) {
                        *gd += gv * p;
                    }
                }
                Op::Concat(parts) => {
                    let mut offset = 0;
                    for &p in parts {
                        let len = self.value(p).numel();
                        add_into(grads[p.0].data_mut(), &g.data()[offset..offset + len]);
                        offset += len;
                    }
                }
                Op::Flatten(a) => {
                    add_into(grads[a.0].data_mut(), g.data());
                }
            }
        }
        Ok(Gradients { grads })
    }
}

/// Identity with the node index; exists only to make the self-referential
/// "use the op's own output value" reads explicit in the backward match.
fn i_node(i: usize) -> NodeId {
    NodeId(i)
}

fn add_into(dst: &mut [f64], src: &[f64]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

fn sub_into(dst: &mut [f64], src: &[f64]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d -= s;
    }
}

/// `dst += g ∘ scale`, elementwise.
fn acc_scaled(dst: &mut [f64], g: &[f64], scale: &[f64]) {
    for ((d, &gv), &sv) in dst.iter_mut().zip(g).zip(scale) {
        *d += gv * sv;
    }
}

/// `dA += dC · Bᵀ` for the matmul backward pass, without materializing Bᵀ.
/// `dC` is `m×n`, `B` is `k×n`, `dA` is `m×k`.
fn acc_grad_matmul_lhs(dc: &[f64], b: &[f64], da: &mut [f64], m: usize, k: usize, n: usize) {
    for i in 0..m {
        let dc_row = &dc[i * n..(i + 1) * n];
        let da_row = &mut da[i * k..(i + 1) * k];
        for (p, da_ip) in da_row.iter_mut().enumerate() {
            let b_row = &b[p * n..(p + 1) * n];
            let dot: f64 = dc_row.iter().zip(b_row).map(|(&x, &y)| x * y).sum();
            *da_ip += dot;
        }
    }
}

/// `dB += Aᵀ · dC`. `A` is `m×k`, `dC` is `m×n`, `dB` is `k×n`.
fn acc_grad_matmul_rhs(a: &[f64], dc: &[f64], db: &mut [f64], m: usize, k: usize, n: usize) {
    for i in 0..m {
        let a_row = &a[i * k..(i + 1) * k];
        let dc_row = &dc[i * n..(i + 1) * n];
        for (p, &a_ip) in a_row.iter().enumerate() {
            let db_row = &mut db[p * n..(p + 1) * n];
            for (d, &gv) in db_row.iter_mut().zip(dc_row) {
                *d += a_ip * gv;
            }
        }
    }
}

/// Central-difference gradient check for a scalar-valued graph over several
/// input tensors.
///
/// `build` must construct the same graph every time it is called with fresh
/// leaves (it runs once for the analytic gradient and twice per input
/// component for the differences). Returns the worst relative error, where
/// each comparison uses `|a - b| / max(|a|, |b|, 1e-8)`; a constant
/// function therefore reports error 0 against its all-zero gradient.
pub fn finite_diff_check_many<F>(build: F, inputs: &[Tensor], h: f64) -> Result<f64>
where
    F: Fn(&mut Tape, &[NodeId]) -> Result<NodeId>,
{
    let mut tape = Tape::new();
    let ids: Vec<NodeId> = inputs.iter().map(|t| tape.leaf(t.clone())).collect();
    let root = build(&mut tape, &ids)?;
    if !tape.value(root).is_scalar() {
        return Err(contract_err!(
            "finite_diff_check: graph output must be scalar, got shape {:?}",
            tape.value(root).shape()
        ));
    }
    let grads = tape.backward(root)?;

    let eval = |which: usize, component: usize, delta: f64| -> Result<f64> {
        let mut shifted: Vec<Tensor> = inputs.to_vec();
        shifted[which].data_mut()[component] += delta;
        let mut t = Tape::new();
        let ids: Vec<NodeId> = shifted.into_iter().map(|t2| t.leaf(t2)).collect();
        let r = build(&mut t, &ids)?;
        Ok(t.value(r).scalar_value())
    };

    let mut worst = 0.0f64;
    for (which, input) in inputs.iter().enumerate() {
        let analytic = grads.wrt(ids[which]);
        for component in 0..input.numel() {
            let plus = eval(which, component, h)?;
            let minus = eval(which, component, -h)?;
            let fd = (plus - minus) / (2.0 * h);
            worst = worst.max(num::rel_err(analytic.data()[component], fd));
        }
    }
    Ok(worst)
}

/// Single-input wrapper around [`finite_diff_check_many`].
pub fn finite_diff_check<F>(build: F, input: &Tensor, h: f64) -> Result<f64>
where
    F: Fn(&mut Tape, NodeId) -> Result<NodeId>,
{
    finite_diff_check_many(|t, ids| build(t, ids[0]), std::slice::from_ref(input), h)
}
