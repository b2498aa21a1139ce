//! Dense row-major complex tensors with axis-lane access.
//!
//! This is the minimal array substrate the spectral code needs: flat storage,
//! row-major strides, odometer iteration over multi-indices, and enumeration
//! of one-dimensional lanes along a chosen axis (the access pattern of every
//! per-axis transform).

use num_complex::Complex64;

/// Dense row-major tensor of complex values.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<Complex64>,
}

impl Tensor {
    /// Zero tensor with the given dimensions. Every dimension must be >= 1.
    pub fn zeros(dims: &[usize]) -> Self {
        assert!(!dims.is_empty(), "tensor needs at least one axis");
        assert!(dims.iter().all(|&d| d >= 1), "zero-length axis");
        let len = dims.iter().product();
        Tensor {
            dims: dims.to_vec(),
            data: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// Wrap existing data (row-major) with the given dimensions.
    pub fn from_data(dims: &[usize], data: Vec<Complex64>) -> Self {
        assert_eq!(
            dims.iter().product::<usize>(),
            data.len(),
            "data length does not match dimensions"
        );
        Tensor {
            dims: dims.to_vec(),
            data,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    /// Row-major strides (last axis is contiguous).
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    /// Flat offset of a multi-index.
    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.dims.len());
        let mut off = 0usize;
        let mut stride = 1usize;
        for axis in (0..self.dims.len()).rev() {
            debug_assert!(index[axis] < self.dims[axis]);
            off += index[axis] * stride;
            stride *= self.dims[axis];
        }
        off
    }

    pub fn get(&self, index: &[usize]) -> Complex64 {
        self.data[self.offset(index)]
    }

    pub fn set(&mut self, index: &[usize], value: Complex64) {
        let off = self.offset(index);
        self.data[off] = value;
    }

    /// Visit every element as `(multi_index, flat_offset)` in row-major order.
    ///
    /// The index buffer is reused between calls; copy it if it must outlive
    /// the closure invocation.
    pub fn for_each_index(&self, mut f: impl FnMut(&[usize], usize)) {
        let mut index = vec![0usize; self.dims.len()];
        for off in 0..self.data.len() {
            f(&index, off);
            // odometer increment, last axis fastest
            for axis in (0..self.dims.len()).rev() {
                index[axis] += 1;
                if index[axis] < self.dims[axis] {
                    break;
                }
                index[axis] = 0;
            }
        }
    }

    /// Enumerate the 1-D lanes along `axis` as `(base_offset, stride)`.
    ///
    /// A lane visits elements `base + j * stride` for `j` in
    /// `0..dims[axis]`. Together the lanes partition the tensor.
    pub fn lanes(&self, axis: usize) -> Vec<(usize, usize)> {
        assert!(axis < self.dims.len());
        let stride: usize = self.dims[axis + 1..].iter().product();
        let outer: usize = self.dims[..axis].iter().product();
        let block = stride * self.dims[axis];
        let mut out = Vec::with_capacity(outer * stride);
        for o in 0..outer {
            for i in 0..stride {
                out.push((o * block + i, stride));
            }
        }
        out
    }

    /// Gather the lane at `(base, stride)` into `buf` (length `dims[axis]`).
    pub fn read_lane(&self, base: usize, stride: usize, buf: &mut [Complex64]) {
        for (j, slot) in buf.iter_mut().enumerate() {
            *slot = self.data[base + j * stride];
        }
    }

    /// Scatter `buf` back into the lane at `(base, stride)`.
    pub fn write_lane(&mut self, base: usize, stride: usize, buf: &[Complex64]) {
        for (j, &v) in buf.iter().enumerate() {
            self.data[base + j * stride] = v;
        }
    }

    /// Apply `f` to every lane along `axis`, in place. `f` receives the lane
    /// gathered into a scratch buffer and must leave its result there.
    pub fn map_lanes(&mut self, axis: usize, mut f: impl FnMut(&mut [Complex64])) {
        let n = self.dims[axis];
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (base, stride) in self.lanes(axis) {
            self.read_lane(base, stride, &mut buf);
            f(&mut buf);
            self.write_lane(base, stride, &buf);
        }
    }

    /// Maximum modulus over all elements.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Sum of all elements.
    pub fn sum(&self) -> Complex64 {
        self.data.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn strides_and_offsets_row_major() {
        let t = Tensor::zeros(&[2, 3, 4]);
        assert_eq!(t.strides(), vec![12, 4, 1]);
        assert_eq!(t.offset(&[0, 0, 0]), 0);
        assert_eq!(t.offset(&[1, 2, 3]), 12 + 8 + 3);
        assert_eq!(t.offset(&[1, 0, 2]), 14);
    }

    #[test]
    fn for_each_index_visits_in_flat_order() {
        let t = Tensor::zeros(&[2, 2]);
        let mut seen = Vec::new();
        t.for_each_index(|idx, off| seen.push((idx.to_vec(), off)));
        assert_eq!(
            seen,
            vec![
                (vec![0, 0], 0),
                (vec![0, 1], 1),
                (vec![1, 0], 2),
                (vec![1, 1], 3),
            ]
        );
    }

    #[test]
    fn lanes_partition_tensor() {
        let t = Tensor::zeros(&[3, 4, 5]);
        for axis in 0..3 {
            let lanes = t.lanes(axis);
            assert_eq!(lanes.len() * t.dims()[axis], t.len());
            let mut hit = vec![false; t.len()];
            for (base, stride) in lanes {
                for j in 0..t.dims()[axis] {
                    let off = base + j * stride;
                    assert!(!hit[off], "offset visited twice");
                    hit[off] = true;
                }
            }
            assert!(hit.iter().all(|&h| h));
        }
    }

    #[test]
    fn map_lanes_applies_along_correct_axis() {
        // 2x3 tensor, values 0..6; reverse each row (axis 1).
        let data: Vec<Complex64> = (0..6).map(|k| c(k as f64)).collect();
        let mut t = Tensor::from_data(&[2, 3], data);
        t.map_lanes(1, |lane| lane.reverse());
        let got: Vec<f64> = t.data().iter().map(|z| z.re).collect();
        assert_eq!(got, vec![2.0, 1.0, 0.0, 5.0, 4.0, 3.0]);
    }

    #[test]
    fn get_set_roundtrip() {
        let mut t = Tensor::zeros(&[2, 2, 2]);
        t.set(&[1, 0, 1], Complex64::new(3.5, -1.0));
        assert_eq!(t.get(&[1, 0, 1]), Complex64::new(3.5, -1.0));
        assert_eq!(t.get(&[0, 0, 0]), Complex64::new(0.0, 0.0));
    }
}
