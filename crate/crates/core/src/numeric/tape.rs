//! A small reverse-mode tape over 2-D tensors.
//!
//! Every value is a matrix `[rows × cols]`. Sequence batches use a
//! sample-major row layout: row `b * len + t` holds timestep `t` of sample `b`.

use std::rc::Rc;

use super::tensor::{gelu_grad_scalar, gelu_scalar, mm, mm_at, mm_bt, sigmoid_scalar, softmax_into, Tensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    MatMulBt(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    AddRow(Var, Var),
    MulCol(Var, Var),
    Affine(Var, f64),
    Sigmoid(Var),
    Tanh(Var),
    Gelu(Var),
    SoftmaxRows(Var),
    ConcatCols(Vec<Var>),
    SliceCols(Var, usize),
    GatherRows(Var, Vec<usize>),
    InterleaveTime(Vec<Var>),
    ShiftTime { src: Var, len: usize, shift: usize },
    BlockMatMulBt(Var, Var, usize),
    BlockMatMul(Var, Var, usize),
    MulConst(Var, Rc<Vec<f64>>),
    LayerNormRows(Var, Rc<Vec<f64>>),
    WeightedSqError { pred: Var, target: Rc<Vec<f64>>, weight: Rc<Vec<f64>> },
    Huber { pred: Var, target: Rc<Vec<f64>>, delta: f64 },
}

struct Node {
    value: Tensor,
    op: Op,
}

#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

fn rc(v: Vec<f64>) -> Rc<Vec<f64>> {
    Rc::new(v)
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    fn dims(&self, v: Var) -> (usize, usize) {
        let t = &self.nodes[v.0].value;
        (t.rows(), t.cols())
    }

    /// Input or parameter. Non-matrix shapes are viewed as `[rows × last]`.
    pub fn leaf(&mut self, value: Tensor) -> Var {
        let (r, c) = (value.rows(), value.cols());
        let t = Tensor::matrix(r, c, value.into_data());
        self.push(t, Op::Leaf)
    }

    pub fn constant(&mut self, rows: usize, cols: usize, data: Vec<f64>) -> Var {
        self.push(Tensor::matrix(rows, cols, data), Op::Leaf)
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let (m, k) = self.dims(a);
        let (k2, n) = self.dims(b);
        assert_eq!(k, k2, "matmul inner dims");
        let mut out = vec![0.0; m * n];
        mm(self.value(a).data(), self.value(b).data(), m, k, n, &mut out);
        self.push(Tensor::matrix(m, n, out), Op::MatMul(a, b))
    }

    /// `a · bᵀ`
    pub fn matmul_bt(&mut self, a: Var, b: Var) -> Var {
        let (m, k) = self.dims(a);
        let (n, k2) = self.dims(b);
        assert_eq!(k, k2, "matmul_bt inner dims");
        let mut out = vec![0.0; m * n];
        mm_bt(self.value(a).data(), self.value(b).data(), m, k, n, &mut out);
        self.push(Tensor::matrix(m, n, out), Op::MatMulBt(a, b))
    }

    /// Affine map `x · Wᵀ + b` with `W` stored `[out × in]`.
    pub fn linear(&mut self, x: Var, w: Var, b: Var) -> Var {
        let y = self.matmul_bt(x, w);
        self.add_row(y, b)
    }

    fn zip(&mut self, a: Var, b: Var, f: impl Fn(f64, f64) -> f64, op: Op) -> Var {
        let (ta, tb) = (self.value(a), self.value(b));
        assert_eq!(ta.shape(), tb.shape(), "elementwise shapes");
        let data = ta.data().iter().zip(tb.data()).map(|(&x, &y)| f(x, y)).collect();
        let (r, c) = (ta.rows(), ta.cols());
        self.push(Tensor::matrix(r, c, data), op)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        self.zip(a, b, |x, y| x + y, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        self.zip(a, b, |x, y| x - y, Op::Sub(a, b))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        self.zip(a, b, |x, y| x * y, Op::Mul(a, b))
    }

    /// Broadcast a `[1 × n]` row over every row of `a`.
    pub fn add_row(&mut self, a: Var, row: Var) -> Var {
        let (m, n) = self.dims(a);
        assert_eq!(self.value(row).len(), n, "add_row width");
        let r = self.value(row).data().to_vec();
        let mut data = self.value(a).data().to_vec();
        for chunk in data.chunks_mut(n) {
            for (x, y) in chunk.iter_mut().zip(&r) {
                *x += y;
            }
        }
        self.push(Tensor::matrix(m, n, data), Op::AddRow(a, row))
    }

    /// Scale row `i` of `a` by `s[i]` (`s` is `[m × 1]`).
    pub fn mul_col(&mut self, a: Var, s: Var) -> Var {
        let (m, n) = self.dims(a);
        assert_eq!(self.value(s).len(), m, "mul_col height");
        let sv = self.value(s).data().to_vec();
        let mut data = self.value(a).data().to_vec();
        for (chunk, &k) in data.chunks_mut(n).zip(&sv) {
            for x in chunk {
                *x *= k;
            }
        }
        self.push(Tensor::matrix(m, n, data), Op::MulCol(a, s))
    }

    /// `scale * a + shift`
    pub fn affine(&mut self, a: Var, scale: f64, shift: f64) -> Var {
        let t = self.value(a).map(|x| scale * x + shift);
        self.push(t, Op::Affine(a, scale))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let t = self.value(a).map(sigmoid_scalar);
        self.push(t, Op::Sigmoid(a))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let t = self.value(a).map(f64::tanh);
        self.push(t, Op::Tanh(a))
    }

    pub fn gelu(&mut self, a: Var) -> Var {
        let t = self.value(a).map(gelu_scalar);
        self.push(t, Op::Gelu(a))
    }

    pub fn softmax_rows(&mut self, a: Var) -> Var {
        let (m, n) = self.dims(a);
        let src = self.value(a).data();
        let mut data = vec![0.0; m * n];
        for (o, i) in data.chunks_mut(n).zip(src.chunks(n)) {
            softmax_into(i, o);
        }
        self.push(Tensor::matrix(m, n, data), Op::SoftmaxRows(a))
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Var {
        let m = self.dims(parts[0]).0;
        let widths: Vec<usize> = parts
            .iter()
            .map(|&p| {
                let (r, c) = self.dims(p);
                assert_eq!(r, m, "concat_cols rows");
                c
            })
            .collect();
        let n: usize = widths.iter().sum();
        let mut data = Vec::with_capacity(m * n);
        for i in 0..m {
            for (&p, &w) in parts.iter().zip(&widths) {
                data.extend_from_slice(&self.value(p).data()[i * w..(i + 1) * w]);
            }
        }
        self.push(Tensor::matrix(m, n, data), Op::ConcatCols(parts.to_vec()))
    }

    pub fn slice_cols(&mut self, a: Var, start: usize, end: usize) -> Var {
        let (m, n) = self.dims(a);
        assert!(start < end && end <= n, "slice_cols range");
        let w = end - start;
        let src = self.value(a).data();
        let mut data = Vec::with_capacity(m * w);
        for i in 0..m {
            data.extend_from_slice(&src[i * n + start..i * n + end]);
        }
        self.push(Tensor::matrix(m, w, data), Op::SliceCols(a, start))
    }

    pub fn gather_rows(&mut self, a: Var, rows: Vec<usize>) -> Var {
        let n = self.dims(a).1;
        let src = self.value(a).data();
        let mut data = Vec::with_capacity(rows.len() * n);
        for &r in &rows {
            data.extend_from_slice(&src[r * n..(r + 1) * n]);
        }
        let m = rows.len();
        self.push(Tensor::matrix(m, n, data), Op::GatherRows(a, rows))
    }

    /// Rows `{b * len + t}` for every sample `b` (timestep slice of a sequence batch).
    pub fn timestep(&mut self, a: Var, len: usize, t: usize) -> Var {
        let batch = self.dims(a).0 / len;
        self.gather_rows(a, (0..batch).map(|b| b * len + t).collect())
    }

    /// Stack per-timestep `[B × n]` values into a sample-major `[B·len × n]` sequence.
    pub fn interleave_time(&mut self, steps: &[Var]) -> Var {
        let len = steps.len();
        let (batch, n) = self.dims(steps[0]);
        let mut data = vec![0.0; batch * len * n];
        for (t, &s) in steps.iter().enumerate() {
            let src = self.value(s).data();
            for b in 0..batch {
                let dst = (b * len + t) * n;
                data[dst..dst + n].copy_from_slice(&src[b * n..(b + 1) * n]);
            }
        }
        self.push(Tensor::matrix(batch * len, n, data), Op::InterleaveTime(steps.to_vec()))
    }

    /// Delay each sequence by `shift` steps; the first `shift` rows of each block become `fill`.
    pub fn shift_time(&mut self, a: Var, len: usize, shift: usize, fill: f64) -> Var {
        let (m, n) = self.dims(a);
        let src = self.value(a).data();
        let mut data = vec![fill; m * n];
        for b in 0..m / len {
            for t in shift..len {
                let d = (b * len + t) * n;
                let s = (b * len + t - shift) * n;
                data[d..d + n].copy_from_slice(&src[s..s + n]);
            }
        }
        self.push(Tensor::matrix(m, n, data), Op::ShiftTime { src: a, len, shift })
    }

    /// Per-block `A_b · B_bᵀ` where both operands hold `blocks` stacked `[len × k]` blocks.
    pub fn block_matmul_bt(&mut self, a: Var, b: Var, blocks: usize) -> Var {
        let (m, k) = self.dims(a);
        assert_eq!(self.dims(b), (m, k), "block_matmul_bt shapes");
        let len = m / blocks;
        let mut out = vec![0.0; m * len];
        let (ad, bd) = (self.value(a).data(), self.value(b).data());
        for blk in 0..blocks {
            let off = blk * len * k;
            mm_bt(
                &ad[off..off + len * k],
                &bd[off..off + len * k],
                len,
                k,
                len,
                &mut out[blk * len * len..(blk + 1) * len * len],
            );
        }
        self.push(Tensor::matrix(m, len, out), Op::BlockMatMulBt(a, b, blocks))
    }

    /// Per-block `A_b[len × len] · V_b[len × n]`.
    pub fn block_matmul(&mut self, a: Var, v: Var, blocks: usize) -> Var {
        let (m, len) = self.dims(a);
        let (m2, n) = self.dims(v);
        assert_eq!(m, m2, "block_matmul rows");
        assert_eq!(m / blocks, len, "block_matmul block size");
        let mut out = vec![0.0; m * n];
        let (ad, vd) = (self.value(a).data(), self.value(v).data());
        for blk in 0..blocks {
            mm(
                &ad[blk * len * len..(blk + 1) * len * len],
                &vd[blk * len * n..(blk + 1) * len * n],
                len,
                len,
                n,
                &mut out[blk * len * n..(blk + 1) * len * n],
            );
        }
        self.push(Tensor::matrix(m, n, out), Op::BlockMatMul(a, v, blocks))
    }

    /// Elementwise product with a constant (e.g. a dropout mask).
    pub fn mul_const(&mut self, a: Var, mask: Vec<f64>) -> Var {
        assert_eq!(self.value(a).len(), mask.len(), "mul_const length");
        let (m, n) = self.dims(a);
        let data = self.value(a).data().iter().zip(&mask).map(|(x, k)| x * k).collect();
        self.push(Tensor::matrix(m, n, data), Op::MulConst(a, rc(mask)))
    }

    /// Row-wise normalization to zero mean and unit variance (no affine part).
    pub fn layer_norm_rows(&mut self, a: Var, eps: f64) -> Var {
        let (m, n) = self.dims(a);
        let src = self.value(a).data();
        let mut data = vec![0.0; m * n];
        let mut inv_std = Vec::with_capacity(m);
        for i in 0..m {
            let row = &src[i * n..(i + 1) * n];
            let mean = row.iter().sum::<f64>() / n as f64;
            let var = row.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
            let is = 1.0 / (var + eps).sqrt();
            for j in 0..n {
                data[i * n + j] = (row[j] - mean) * is;
            }
            inv_std.push(is);
        }
        self.push(Tensor::matrix(m, n, data), Op::LayerNormRows(a, rc(inv_std)))
    }

    /// `(1/B) Σ w_i (pred_i − target_i)²` as a `[1 × 1]` node.
    pub fn weighted_sq_error(&mut self, pred: Var, target: Vec<f64>, weight: Vec<f64>) -> Var {
        let p = self.value(pred).data();
        assert_eq!(p.len(), target.len());
        assert_eq!(p.len(), weight.len());
        let b = p.len() as f64;
        let loss = p
            .iter()
            .zip(&target)
            .zip(&weight)
            .map(|((y, t), w)| w * (y - t) * (y - t))
            .sum::<f64>()
            / b;
        self.push(
            Tensor::matrix(1, 1, vec![loss]),
            Op::WeightedSqError {
                pred,
                target: rc(target),
                weight: rc(weight),
            },
        )
    }

    pub fn huber(&mut self, pred: Var, target: Vec<f64>, delta: f64) -> Var {
        let p = self.value(pred).data();
        assert_eq!(p.len(), target.len());
        let loss = p
            .iter()
            .zip(&target)
            .map(|(y, t)| crate::loss::huber_term(y - t, delta))
            .sum::<f64>()
            / p.len() as f64;
        self.push(
            Tensor::matrix(1, 1, vec![loss]),
            Op::Huber {
                pred,
                target: rc(target),
                delta,
            },
        )
    }

    /// Backpropagate from `out` seeded with `seed` (same shape as `out`).
    ///
    /// Returns one optional gradient buffer per node; nodes that `out` does not
    /// depend on stay `None`.
    pub fn backward_with(&self, out: Var, seed: Vec<f64>) -> Gradients {
        assert_eq!(seed.len(), self.value(out).len(), "seed length");
        let mut grads: Vec<Option<Vec<f64>>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[out.0] = Some(seed);
        for idx in (0..=out.0).rev() {
            let Some(g) = grads[idx].take() else { continue };
            self.propagate(idx, &g, &mut grads);
            grads[idx] = Some(g);
        }
        Gradients { grads }
    }

    pub fn backward(&self, out: Var) -> Gradients {
        let n = self.value(out).len();
        self.backward_with(out, vec![1.0; n])
    }

    fn propagate(&self, idx: usize, g: &[f64], grads: &mut [Option<Vec<f64>>]) {
        let node = &self.nodes[idx];
        let out = &node.value;
        match &node.op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                let (m, k) = self.dims(*a);
                let n = self.dims(*b).1;
                let (av, bv) = (self.value(*a).data(), self.value(*b).data());
                mm_bt(g, bv, m, n, k, acc(&self.nodes, grads, *a));
                mm_at(av, g, m, k, n, acc(&self.nodes, grads, *b));
            }
            Op::MatMulBt(a, b) => {
                let (m, k) = self.dims(*a);
                let n = self.dims(*b).0;
                let (av, bv) = (self.value(*a).data(), self.value(*b).data());
                mm(g, bv, m, n, k, acc(&self.nodes, grads, *a));
                mm_at(g, av, m, n, k, acc(&self.nodes, grads, *b));
            }
            Op::Add(a, b) => {
                add_into(acc(&self.nodes, grads, *a), g);
                add_into(acc(&self.nodes, grads, *b), g);
            }
            Op::Sub(a, b) => {
                add_into(acc(&self.nodes, grads, *a), g);
                for (d, &x) in acc(&self.nodes, grads, *b).iter_mut().zip(g) {
                    *d -= x;
                }
            }
            Op::Mul(a, b) => {
                let (av, bv) = (self.value(*a).data(), self.value(*b).data());
                for ((d, &x), &y) in acc(&self.nodes, grads, *a).iter_mut().zip(g).zip(bv) {
                    *d += x * y;
                }
                for ((d, &x), &y) in acc(&self.nodes, grads, *b).iter_mut().zip(g).zip(av) {
                    *d += x * y;
                }
            }
            Op::AddRow(a, row) => {
                add_into(acc(&self.nodes, grads, *a), g);
                let n = out.cols();
                let dr = acc(&self.nodes, grads, *row);
                for chunk in g.chunks(n) {
                    add_into(dr, chunk);
                }
            }
            Op::MulCol(a, s) => {
                let n = out.cols();
                let (av, sv) = (self.value(*a).data(), self.value(*s).data());
                {
                    let da = acc(&self.nodes, grads, *a);
                    for (i, &k) in sv.iter().enumerate() {
                        for j in 0..n {
                            da[i * n + j] += g[i * n + j] * k;
                        }
                    }
                }
                let ds = acc(&self.nodes, grads, *s);
                for (i, d) in ds.iter_mut().enumerate() {
                    let mut t = 0.0;
                    for j in 0..n {
                        t += g[i * n + j] * av[i * n + j];
                    }
                    *d += t;
                }
            }
            Op::Affine(a, scale) => {
                for (d, &x) in acc(&self.nodes, grads, *a).iter_mut().zip(g) {
                    *d += scale * x;
                }
            }
            Op::Sigmoid(a) => {
                for ((d, &x), &y) in acc(&self.nodes, grads, *a).iter_mut().zip(g).zip(out.data()) {
                    *d += x * y * (1.0 - y);
                }
            }
            Op::Tanh(a) => {
                for ((d, &x), &y) in acc(&self.nodes, grads, *a).iter_mut().zip(g).zip(out.data()) {
                    *d += x * (1.0 - y * y);
                }
            }
            Op::Gelu(a) => {
                let av = self.value(*a).data();
                for ((d, &x), &z) in acc(&self.nodes, grads, *a).iter_mut().zip(g).zip(av) {
                    *d += x * gelu_grad_scalar(z);
                }
            }
            Op::SoftmaxRows(a) => {
                let n = out.cols();
                let da = acc(&self.nodes, grads, *a);
                for ((drow, grow), yrow) in da.chunks_mut(n).zip(g.chunks(n)).zip(out.data().chunks(n)) {
                    let dot: f64 = grow.iter().zip(yrow).map(|(x, y)| x * y).sum();
                    for ((d, &x), &y) in drow.iter_mut().zip(grow).zip(yrow) {
                        *d += y * (x - dot);
                    }
                }
            }
            Op::ConcatCols(parts) => {
                let m = out.rows();
                let n = out.cols();
                let mut off = 0;
                for &p in parts {
                    let w = self.dims(p).1;
                    let dp = acc(&self.nodes, grads, p);
                    for i in 0..m {
                        add_into(&mut dp[i * w..(i + 1) * w], &g[i * n + off..i * n + off + w]);
                    }
                    off += w;
                }
            }
            Op::SliceCols(a, start) => {
                let (m, w) = (out.rows(), out.cols());
                let n = self.dims(*a).1;
                let da = acc(&self.nodes, grads, *a);
                for i in 0..m {
                    add_into(&mut da[i * n + start..i * n + start + w], &g[i * w..(i + 1) * w]);
                }
            }
            Op::GatherRows(a, rows) => {
                let n = out.cols();
                let da = acc(&self.nodes, grads, *a);
                for (i, &r) in rows.iter().enumerate() {
                    add_into(&mut da[r * n..(r + 1) * n], &g[i * n..(i + 1) * n]);
                }
            }
            Op::InterleaveTime(steps) => {
                let len = steps.len();
                let n = out.cols();
                let batch = out.rows() / len;
                for (t, &s) in steps.iter().enumerate() {
                    let ds = acc(&self.nodes, grads, s);
                    for b in 0..batch {
                        let src = (b * len + t) * n;
                        add_into(&mut ds[b * n..(b + 1) * n], &g[src..src + n]);
                    }
                }
            }
            Op::ShiftTime { src, len, shift } => {
                let n = out.cols();
                let m = out.rows();
                let ds = acc(&self.nodes, grads, *src);
                for b in 0..m / len {
                    for t in *shift..*len {
                        let d = (b * len + t) * n;
                        let s = (b * len + t - shift) * n;
                        add_into(&mut ds[s..s + n], &g[d..d + n]);
                    }
                }
            }
            Op::BlockMatMulBt(a, b, blocks) => {
                let (m, k) = self.dims(*a);
                let len = m / blocks;
                let (av, bv) = (self.value(*a).data(), self.value(*b).data());
                for blk in 0..*blocks {
                    let off = blk * len * k;
                    let go = &g[blk * len * len..(blk + 1) * len * len];
                    mm(go, &bv[off..off + len * k], len, len, k, &mut acc(&self.nodes, grads, *a)[off..off + len * k]);
                    mm_at(go, &av[off..off + len * k], len, len, k, &mut acc(&self.nodes, grads, *b)[off..off + len * k]);
                }
            }
            Op::BlockMatMul(a, v, blocks) => {
                let (m, len) = self.dims(*a);
                let n = self.dims(*v).1;
                let _ = m;
                let (av, vv) = (self.value(*a).data(), self.value(*v).data());
                for blk in 0..*blocks {
                    let ao = blk * len * len;
                    let vo = blk * len * n;
                    let go = &g[vo..vo + len * n];
                    mm_bt(go, &vv[vo..vo + len * n], len, n, len, &mut acc(&self.nodes, grads, *a)[ao..ao + len * len]);
                    mm_at(&av[ao..ao + len * len], go, len, len, n, &mut acc(&self.nodes, grads, *v)[vo..vo + len * n]);
                }
            }
            Op::MulConst(a, mask) => {
                for ((d, &x), &k) in acc(&self.nodes, grads, *a).iter_mut().zip(g).zip(mask.iter()) {
                    *d += x * k;
                }
            }
            Op::LayerNormRows(a, inv_std) => {
                let n = out.cols();
                let da = acc(&self.nodes, grads, *a);
                for (i, &is) in inv_std.iter().enumerate() {
                    let grow = &g[i * n..(i + 1) * n];
                    let yrow = &out.data()[i * n..(i + 1) * n];
                    let gm = grow.iter().sum::<f64>() / n as f64;
                    let gy = grow.iter().zip(yrow).map(|(x, y)| x * y).sum::<f64>() / n as f64;
                    for j in 0..n {
                        da[i * n + j] += is * (grow[j] - gm - yrow[j] * gy);
                    }
                }
            }
            Op::WeightedSqError { pred, target, weight } => {
                let p = self.value(*pred).data();
                let b = p.len() as f64;
                let dp = acc(&self.nodes, grads, *pred);
                for i in 0..p.len() {
                    dp[i] += g[0] * 2.0 * weight[i] * (p[i] - target[i]) / b;
                }
            }
            Op::Huber { pred, target, delta } => {
                let p = self.value(*pred).data();
                let b = p.len() as f64;
                let dp = acc(&self.nodes, grads, *pred);
                for i in 0..p.len() {
                    let e = p[i] - target[i];
                    let de = if e.abs() <= *delta { e } else { delta * e.signum() };
                    dp[i] += g[0] * de / b;
                }
            }
        }
    }
}

fn add_into(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

/// Per-node gradient buffers from one backward sweep.
fn acc<'g>(nodes: &[Node], grads: &'g mut [Option<Vec<f64>>], v: Var) -> &'g mut Vec<f64> {
    let len = nodes[v.0].value.len();
    grads[v.0].get_or_insert_with(|| vec![0.0; len])
}

pub struct Gradients {
    grads: Vec<Option<Vec<f64>>>,
}

impl Gradients {
    pub fn get(&self, v: Var) -> Option<&[f64]> {
        self.grads.get(v.0).and_then(|g| g.as_deref())
    }

    pub fn take(&mut self, v: Var) -> Option<Vec<f64>> {
        self.grads.get_mut(v.0).and_then(Option::take)
    }
}
