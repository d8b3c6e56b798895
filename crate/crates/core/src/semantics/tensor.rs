use serde::{Deserialize, Serialize};

/// Dense row-major real tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

/// Steps a multi-index through `shape` in row-major order. Returns false
/// once every index has been visited.
fn advance(idx: &mut [usize], shape: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < shape[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

impl Tensor {
    /// `None` when `data` does not fill `shape`.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Option<Self> {
        (shape.iter().product::<usize>() == data.len()).then_some(Tensor { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let n = shape.iter().product();
        Tensor {
            shape,
            data: vec![0.0; n],
        }
    }

    pub fn scalar(x: f64) -> Self {
        Tensor {
            shape: Vec::new(),
            data: vec![x],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut t = Self::zeros(vec![d, d]);
        for i in 0..d {
            t.data[i * d + i] = 1.0;
        }
        t
    }

    /// Basis vector `e_i` of length `d`.
    pub fn basis(d: usize, i: usize) -> Self {
        let mut t = Self::zeros(vec![d]);
        t.data[i] = 1.0;
        t
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        let st = strides(&self.shape);
        self.data[idx.iter().zip(&st).map(|(i, s)| i * s).sum::<usize>()]
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Flat inner product; shapes must agree.
    pub fn inner(&self, other: &Tensor) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, k: f64) -> Tensor {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn outer(&self, other: &Tensor) -> Tensor {
        let mut shape = self.shape.clone();
        shape.extend_from_slice(&other.shape);
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            data.extend(other.data.iter().map(|b| a * b));
        }
        Tensor { shape, data }
    }

    /// Axis `k` of the result is axis `axes[k]` of `self`.
    pub fn permute(&self, axes: &[usize]) -> Tensor {
        assert_eq!(axes.len(), self.rank(), "permutation length");
        let shape: Vec<usize> = axes.iter().map(|&a| self.shape[a]).collect();
        let src = strides(&self.shape);
        let step: Vec<usize> = axes.iter().map(|&a| src[a]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        if self.data.is_empty() {
            return Tensor { shape, data };
        }
        let mut idx = vec![0; shape.len()];
        loop {
            data.push(self.data[idx.iter().zip(&step).map(|(i, s)| i * s).sum::<usize>()]);
            if !advance(&mut idx, &shape) {
                break;
            }
        }
        Tensor { shape, data }
    }

    /// Sums the diagonal of axes `a` and `b`, removing both.
    pub fn trace(&self, a: usize, b: usize) -> Tensor {
        assert!(a != b && self.shape[a] == self.shape[b], "trace axes");
        let keep: Vec<usize> = (0..self.rank()).filter(|&k| k != a && k != b).collect();
        let shape: Vec<usize> = keep.iter().map(|&k| self.shape[k]).collect();
        let out_st = strides(&shape);
        let mut out = Tensor::zeros(shape);
        if self.data.is_empty() {
            return out;
        }
        let mut idx = vec![0; self.rank()];
        let mut flat = 0;
        loop {
            if idx[a] == idx[b] {
                let o: usize = keep.iter().zip(&out_st).map(|(&k, s)| idx[k] * s).sum();
                out.data[o] += self.data[flat];
            }
            flat += 1;
            if !advance(&mut idx, &self.shape) {
                break;
            }
        }
        out
    }

    /// Sums over each `(axis of self, axis of other)` pair. The result keeps
    /// the remaining axes of `self`, then those of `other`.
    pub fn contract(&self, other: &Tensor, pairs: &[(usize, usize)]) -> Tensor {
        let ca: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let cb: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        for (&x, &y) in ca.iter().zip(&cb) {
            assert_eq!(
                self.shape[x], other.shape[y],
                "contracted axes differ in size"
            );
        }
        let fa: Vec<usize> = (0..self.rank()).filter(|k| !ca.contains(k)).collect();
        let fb: Vec<usize> = (0..other.rank()).filter(|k| !cb.contains(k)).collect();
        let a = self.permute(&[fa.clone(), ca.clone()].concat());
        let b = other.permute(&[cb.clone(), fb.clone()].concat());
        let m: usize = fa.iter().map(|&k| self.shape[k]).product();
        let kk: usize = ca.iter().map(|&k| self.shape[k]).product();
        let n: usize = fb.iter().map(|&k| other.shape[k]).product();
        let mut data = vec![0.0; m * n];
        for i in 0..m {
            for k in 0..kk {
                let x = a.data[i * kk + k];
                if x == 0.0 {
                    continue;
                }
                let row = &b.data[k * n..(k + 1) * n];
                for (out, y) in data[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *out += x * y;
                }
            }
        }
        let mut shape: Vec<usize> = fa.iter().map(|&k| self.shape[k]).collect();
        shape.extend(fb.iter().map(|&k| other.shape[k]));
        Tensor { shape, data }
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        if self.shape != other.shape {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Tensor, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(shape: &[usize], data: &[f64]) -> Tensor {
        Tensor::new(shape.to_vec(), data.to_vec()).unwrap()
    }

    #[test]
    fn matmul_via_contract() {
        let a = t(&[2, 3], &[1., 2., 3., 4., 5., 6.]);
        let b = t(&[3, 2], &[7., 8., 9., 10., 11., 12.]);
        let c = a.contract(&b, &[(1, 0)]);
        assert_eq!(c, t(&[2, 2], &[58., 64., 139., 154.]));
    }

    #[test]
    fn permute_transposes() {
        let a = t(&[2, 3], &[1., 2., 3., 4., 5., 6.]);
        assert_eq!(a.permute(&[1, 0]), t(&[3, 2], &[1., 4., 2., 5., 3., 6.]));
        assert_eq!(a.permute(&[1, 0]).permute(&[1, 0]), a);
    }

    #[test]
    fn trace_of_matrix() {
        let a = t(&[2, 2], &[1., 2., 3., 4.]);
        assert_eq!(a.trace(0, 1), Tensor::scalar(5.0));
    }

    #[test]
    fn outer_and_get() {
        let a = t(&[2], &[1., 2.]);
        let b = t(&[3], &[1., 10., 100.]);
        let o = a.outer(&b);
        assert_eq!(o.shape(), &[2, 3]);
        assert_eq!(o.get(&[1, 2]), 200.0);
        assert!(Tensor::new(vec![2, 2], vec![1.0]).is_none());
    }
}
