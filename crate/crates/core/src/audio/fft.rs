//! Magnitude spectrum of a real frame.
//!
//! Iterative radix-2 transform for power-of-two lengths; other lengths fall
//! back to the direct O(n^2) sum.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math;

#[derive(Clone, Copy, Debug, Default)]
struct Complex {
    re: f64,
    im: f64,
}

impl Complex {
    fn mul(self, o: Self) -> Self {
        Self {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    fn add(self, o: Self) -> Self {
        Self {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }

    fn sub(self, o: Self) -> Self {
        Self {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }

    fn norm(self) -> f64 {
        libm::hypot(self.re, self.im)
    }
}

/// Precomputed transform for a fixed frame length.
#[derive(Debug, Clone)]
pub(crate) struct RealDft {
    len: usize,
    twiddles: Vec<Complex>,
}

impl RealDft {
    pub(crate) fn new(len: usize) -> Self {
        let twiddles = (0..len)
            .map(|k| {
                let a = -2.0 * PI * k as f64 / len as f64;
                Complex {
                    re: math::cos(a),
                    im: math::sin(a),
                }
            })
            .collect();
        Self { len, twiddles }
    }

    /// `|X_k|` for `k = 0..=len/2`.
    pub(crate) fn magnitudes(&self, frame: &[f64]) -> Vec<f64> {
        debug_assert_eq!(frame.len(), self.len);
        let n = self.len;
        let half = n / 2;
        if n.is_power_of_two() {
            let mut buf: Vec<Complex> = frame.iter().map(|&re| Complex { re, im: 0.0 }).collect();
            self.radix2(&mut buf);
            buf[..=half].iter().map(|c| c.norm()).collect()
        } else {
            let mut out = vec![0.0; half + 1];
            for (k, slot) in out.iter_mut().enumerate() {
                let mut acc = Complex::default();
                for (j, &x) in frame.iter().enumerate() {
                    let w = self.twiddles[(k * j) % n];
                    acc = acc.add(Complex {
                        re: w.re * x,
                        im: w.im * x,
                    });
                }
                *slot = acc.norm();
            }
            out
        }
    }

    fn radix2(&self, buf: &mut [Complex]) {
        let n = buf.len();
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let stride = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..size / 2 {
                    let w = self.twiddles[k * stride];
                    let a = buf[start + k];
                    let b = buf[start + k + size / 2].mul(w);
                    buf[start + k] = a.add(b);
                    buf[start + k + size / 2] = a.sub(b);
                }
            }
            size *= 2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(frame: &[f64]) -> Vec<f64> {
        let n = frame.len();
        (0..=n / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (j, &x) in frame.iter().enumerate() {
                    let a = -2.0 * PI * (k * j) as f64 / n as f64;
                    re += x * math::cos(a);
                    im += x * math::sin(a);
                }
                libm::hypot(re, im)
            })
            .collect()
    }

    #[test]
    fn radix2_matches_direct_sum() {
        let frame: Vec<f64> = (0..64).map(|i| math::sin(i as f64 * 0.37) + (i % 5) as f64 * 0.1).collect();
        let fast = RealDft::new(64).magnitudes(&frame);
        for (a, b) in fast.iter().zip(direct(&frame)) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn odd_length_uses_direct_sum() {
        let frame: Vec<f64> = (0..15).map(|i| (i * i % 7) as f64).collect();
        let got = RealDft::new(15).magnitudes(&frame);
        assert_eq!(got.len(), 8);
        for (a, b) in got.iter().zip(direct(&frame)) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
