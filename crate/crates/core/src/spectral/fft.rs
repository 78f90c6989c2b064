use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    /// Normalized by the product of the transformed lengths.
    Inverse,
}

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(n: usize, dir: Direction) -> Arc<dyn Fft<f64>> {
    let mut p = planner().lock().unwrap_or_else(|e| e.into_inner());
    match dir {
        Direction::Forward => p.plan_fft_forward(n),
        Direction::Inverse => p.plan_fft_inverse(n),
    }
}

/// In-place transform of a row-major array along every axis.
pub fn transform(data: &mut [Complex64], shape: &[usize], dir: Direction) {
    let axes: Vec<usize> = (0..shape.len()).collect();
    transform_axes(data, shape, &axes, dir);
}

/// In-place transform along the listed axes only.
pub fn transform_axes(data: &mut [Complex64], shape: &[usize], axes: &[usize], dir: Direction) {
    debug_assert_eq!(data.len(), shape.iter().product::<usize>());
    for &ax in axes {
        transform_axis(data, shape, ax, dir);
    }
    if dir == Direction::Inverse {
        let n: usize = axes.iter().map(|&a| shape[a]).product();
        let s = 1.0 / n as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }
}

fn transform_axis(data: &mut [Complex64], shape: &[usize], axis: usize, dir: Direction) {
    let n = shape[axis];
    if n <= 1 {
        return;
    }
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let fft = plan(n, dir);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    if stride == 1 {
        fft.process_with_scratch(data, &mut scratch);
        return;
    }
    // strided axis: transpose each (n x stride) block so lines are contiguous
    let block = n * stride;
    let mut buf = vec![Complex64::default(); block];
    for o in 0..outer {
        let blk = &mut data[o * block..(o + 1) * block];
        for i in 0..n {
            let row = &blk[i * stride..(i + 1) * stride];
            for (j, z) in row.iter().enumerate() {
                buf[j * n + i] = *z;
            }
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for i in 0..n {
            let row = &mut blk[i * stride..(i + 1) * stride];
            for (j, z) in row.iter_mut().enumerate() {
                *z = buf[j * n + i];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, v)| {
                        v * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / n as f64)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn strided_axis_matches_naive() {
        let shape = [8usize, 4];
        let data: Vec<Complex64> = (0..32)
            .map(|i| Complex64::new((i as f64).sin(), (0.3 * i as f64).cos()))
            .collect();
        let mut out = data.clone();
        transform_axes(&mut out, &shape, &[0], Direction::Forward);
        for j in 0..4 {
            let col: Vec<Complex64> = (0..8).map(|i| data[i * 4 + j]).collect();
            let want = naive_dft(&col);
            for i in 0..8 {
                assert!((out[i * 4 + j] - want[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn round_trip_3d() {
        let shape = [4usize, 8, 4];
        let data: Vec<Complex64> = (0..128)
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), i as f64 * 0.01))
            .collect();
        let mut out = data.clone();
        transform(&mut out, &shape, Direction::Forward);
        transform(&mut out, &shape, Direction::Inverse);
        for (a, b) in out.iter().zip(&data) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
