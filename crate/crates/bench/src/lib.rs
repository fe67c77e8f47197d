//! Shared input builders for the benchmark suite.

use smd_core::frame::{GrayFrame, KernelBuffer};

/// Buffer with the given fraction of foreground pixels (value 255), spread
/// evenly across the frame.
pub fn buffer_with_density(width: usize, height: usize, density: f64) -> KernelBuffer {
    let n = width * height;
    let values = (0..n)
        .map(|i| {
            let before = (i as f64 * density).floor();
            let after = ((i + 1) as f64 * density).floor();
            if after > before {
                255.0
            } else {
                0.0
            }
        })
        .collect();
    KernelBuffer::new(values)
}

/// Deterministic textured frame, useful as a background-subtraction input.
pub fn textured_frame(width: usize, height: usize, phase: usize) -> GrayFrame {
    let pixels = (0..width * height)
        .map(|i| (((i * 31 + phase * 7) % 64) + 60) as u8)
        .collect();
    GrayFrame::new(width, height, pixels).expect("valid dimensions")
}
