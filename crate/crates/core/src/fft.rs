//! Radix-2 complex FFT for power-of-two lengths.
//!
//! Forward transforms use the `e^{-ikx}` kernel, inverse transforms `e^{+ikx}`.
//! Neither is normalized; callers scale by `1/n` where needed.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

pub(crate) struct Fft {
    n: usize,
    twiddles: Vec<Complex64>,
    bit_reverse: Vec<usize>,
}

impl Fft {
    pub(crate) fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "FFT length must be a power of two");
        let twiddles = (0..n / 2)
            .map(|k| {
                let theta = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(libm::cos(theta), libm::sin(theta))
            })
            .collect();
        let bits = n.trailing_zeros();
        let bit_reverse = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        Self {
            n,
            twiddles,
            bit_reverse,
        }
    }

    pub(crate) fn forward(&self, buf: &mut [Complex64]) {
        self.transform(buf, false);
    }

    pub(crate) fn inverse(&self, buf: &mut [Complex64]) {
        self.transform(buf, true);
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        assert_eq!(buf.len(), n);
        for i in 0..n {
            let j = self.bit_reverse[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for j in 0..half {
                    let w = self.twiddles[j * stride];
                    let w = if inverse { w.conj() } else { w };
                    let u = buf[start + j];
                    let v = buf[start + j + half] * w;
                    buf[start + j] = u + v;
                    buf[start + j + half] = u - v;
                }
            }
            len <<= 1;
        }
    }
}

/// In-place 2D transform of a row-major `rows x cols` array.
pub(crate) fn fft2(data: &mut [Complex64], rows: usize, cols: usize, inverse: bool) {
    assert_eq!(data.len(), rows * cols);
    let row_fft = Fft::new(cols);
    for row in data.chunks_exact_mut(cols) {
        if inverse {
            row_fft.inverse(row);
        } else {
            row_fft.forward(row);
        }
    }
    let col_fft = Fft::new(rows);
    let mut column = vec![Complex64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = data[r * cols + c];
        }
        if inverse {
            col_fft.inverse(&mut column);
        } else {
            col_fft.forward(&mut column);
        }
        for r in 0..rows {
            data[r * cols + c] = column[r];
        }
    }
}
