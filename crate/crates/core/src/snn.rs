//! Per-pixel three-layer leaky-integrate-and-fire network.
//!
//! Every pixel owns an independent column of three LIF neurons with 1:1
//! connectivity: layer 1 integrates the pixel value as a current, layer 2
//! integrates layer 1's accumulated spikes, and layer 3 integrates the sum
//! of the layer-2 and layer-3 feed currents. The layer-3 spike count per
//! frame is the motion signal.
//!
//! Two kernel variants are provided: [`Kernel::V1`] sweeps every pixel,
//! [`Kernel::V2`] skips pixels whose input value is not positive. With
//! per-frame state reset the two produce bit-identical output, since a
//! zero-input column never leaves its resting potential.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::frame::KernelBuffer;

/// Neuron and conversion constants shared by all three layers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnnParams {
    /// Membrane resistance (dimensionless scale on input current).
    pub r_m: f32,
    /// Membrane time constant, ms.
    pub tau_m: f32,
    /// Integration step, ms.
    pub dt: f32,
    /// Integration steps per frame.
    pub steps: u32,
    /// Current per unit of pixel intensity.
    pub p2c: f32,
    /// Current per accumulated spike.
    pub s2c: f32,
    pub v_rest: f32,
    pub v_thresh: f32,
    pub v_reset: f32,
}

impl Default for SnnParams {
    fn default() -> Self {
        SnnParams {
            r_m: 1.0,
            tau_m: 10.0,
            dt: 1.0,
            steps: 10,
            p2c: 0.02,
            s2c: 1.0,
            v_rest: 0.0,
            v_thresh: 1.0,
            v_reset: 0.0,
        }
    }
}

impl SnnParams {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, key: &str, reason: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::invalid_config(key, reason))
            }
        };
        check(self.tau_m > 0.0, "snn.tau_m", "must be > 0")?;
        check(self.dt > 0.0, "snn.dt", "must be > 0")?;
        check(self.steps >= 1, "snn.steps", "must be >= 1")?;
        check(
            self.v_thresh > self.v_rest,
            "snn.v_thresh",
            "must exceed v_rest",
        )?;
        check(
            self.v_reset < self.v_thresh,
            "snn.v_reset",
            "must lie below v_thresh",
        )?;
        check(self.p2c > 0.0, "snn.p2c", "must be > 0")?;
        check(self.s2c >= 0.0, "snn.s2c", "must be >= 0")?;
        Ok(())
    }
}

/// One integration step: leak toward rest, add input current, fire on
/// threshold crossing.
#[inline]
pub fn lif_step(v: f32, i_in: f32, p: &SnnParams) -> (f32, bool) {
    let v_cand = v + (p.dt / p.tau_m) * (-(v - p.v_rest) + p.r_m * i_in);
    if v_cand >= p.v_thresh {
        (p.v_reset, true)
    } else {
        (v_cand, false)
    }
}

/// Per-pixel column state: membrane potential and per-frame spike count for
/// each of the three layers.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Cell {
    v: [f32; 3],
    sum: [u32; 3],
}

/// Membrane potentials and spike sums for every pixel column.
#[derive(Debug, Clone, PartialEq)]
pub struct SnnState {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
}

impl SnnState {
    /// Fresh state with all potentials at `v_rest` and all sums at zero.
    pub fn new(width: usize, height: usize, p: &SnnParams) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyFrame);
        }
        let cell = Cell {
            v: [p.v_rest; 3],
            sum: [0; 3],
        };
        Ok(SnnState {
            width,
            height,
            cells: vec![cell; width * height],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.cells.len()
    }

    /// Return every potential and spike sum to its initial value.
    pub fn reset(&mut self, p: &SnnParams) {
        for cell in &mut self.cells {
            cell.v = [p.v_rest; 3];
            cell.sum = [0; 3];
        }
    }

    /// Zero the spike sums, keeping membrane potentials (cross-frame
    /// persistence mode).
    pub fn reset_sums(&mut self) {
        for cell in &mut self.cells {
            cell.sum = [0; 3];
        }
    }

    pub fn potentials(&self, layer: usize) -> Vec<f32> {
        self.cells.iter().map(|c| c.v[layer]).collect()
    }

    pub fn spike_sums(&self, layer: usize) -> Vec<u32> {
        self.cells.iter().map(|c| c.sum[layer]).collect()
    }

    fn layer3_grid(&self) -> SpikeSumGrid {
        SpikeSumGrid {
            width: self.width,
            height: self.height,
            sums: self.cells.iter().map(|c| c.sum[2]).collect(),
        }
    }
}

/// Layer-3 spike counts per pixel for one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeSumGrid {
    width: usize,
    height: usize,
    sums: Vec<u32>,
}

impl SpikeSumGrid {
    pub fn new(width: usize, height: usize, sums: Vec<u32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyFrame);
        }
        if sums.len() != width * height {
            return Err(Error::BadPixelCount {
                len: sums.len(),
                width,
                height,
            });
        }
        Ok(SpikeSumGrid {
            width,
            height,
            sums,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn sums(&self) -> &[u32] {
        &self.sums
    }
}

/// Kernel variant selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// Sweep every pixel column.
    V1,
    /// Skip columns whose input value is <= 0.
    V2,
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "v1" => Ok(Kernel::V1),
            "v2" => Ok(Kernel::V2),
            other => Err(Error::invalid_config(
                "snn.kernel",
                format!("expected v1 or v2, got `{other}`"),
            )),
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::V1 => "v1",
            Kernel::V2 => "v2",
        })
    }
}

#[inline]
fn step_column(cell: &mut Cell, i_s: f32, p: &SnnParams) {
    let (v, spiked) = lif_step(cell.v[0], i_s, p);
    cell.v[0] = v;
    if spiked {
        cell.sum[0] += 1;
    }
    let i_l2 = cell.sum[0] as f32 * p.s2c;
    let (v, spiked) = lif_step(cell.v[1], i_l2, p);
    cell.v[1] = v;
    if spiked {
        cell.sum[1] += 1;
    }
    let i_l3 = cell.sum[1] as f32 * p.s2c;
    let (v, spiked) = lif_step(cell.v[2], i_l2 + i_l3, p);
    cell.v[2] = v;
    if spiked {
        cell.sum[2] += 1;
    }
}

#[inline]
fn run_column(cell: &mut Cell, pixel: f32, p: &SnnParams) {
    let i_s = pixel * p.p2c;
    for _ in 0..p.steps {
        step_column(cell, i_s, p);
    }
}

fn check_buffer(buffer: &KernelBuffer, state: &SnnState) -> Result<()> {
    if buffer.len() != state.pixel_count() {
        return Err(Error::BufferLength {
            buffer: buffer.len(),
            state: state.pixel_count(),
        });
    }
    Ok(())
}

/// Run the full-sweep kernel over one frame.
pub fn snn_frame_v1(
    buffer: &KernelBuffer,
    p: &SnnParams,
    state: &mut SnnState,
) -> Result<SpikeSumGrid> {
    check_buffer(buffer, state)?;
    for (cell, &pixel) in state.cells.iter_mut().zip(buffer.values()) {
        run_column(cell, pixel, p);
    }
    Ok(state.layer3_grid())
}

/// Run the sparse kernel: columns with non-positive input are skipped and
/// keep their reset state.
pub fn snn_frame_v2(
    buffer: &KernelBuffer,
    p: &SnnParams,
    state: &mut SnnState,
) -> Result<SpikeSumGrid> {
    check_buffer(buffer, state)?;
    for (cell, &pixel) in state.cells.iter_mut().zip(buffer.values()) {
        if pixel > 0.0 {
            run_column(cell, pixel, p);
        }
    }
    Ok(state.layer3_grid())
}

/// Run `kernel` over the frame with `lanes` workers on contiguous pixel
/// chunks. Columns are independent, so the result is bit-identical to
/// `lanes = 1` for any lane count.
pub fn run_parallel(
    kernel: Kernel,
    buffer: &KernelBuffer,
    p: &SnnParams,
    state: &mut SnnState,
    lanes: usize,
) -> Result<SpikeSumGrid> {
    if lanes == 0 || !lanes.is_power_of_two() {
        return Err(Error::BadLaneCount(lanes));
    }
    check_buffer(buffer, state)?;

    let n = state.pixel_count();
    let chunk = n.div_ceil(lanes);
    std::thread::scope(|scope| {
        for (cells, values) in state
            .cells
            .chunks_mut(chunk)
            .zip(buffer.values().chunks(chunk))
        {
            scope.spawn(move || {
                for (cell, &pixel) in cells.iter_mut().zip(values) {
                    match kernel {
                        Kernel::V1 => run_column(cell, pixel, p),
                        Kernel::V2 => {
                            if pixel > 0.0 {
                                run_column(cell, pixel, p);
                            }
                        }
                    }
                }
            });
        }
    });
    Ok(state.layer3_grid())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Straight-line scalar simulation of one pixel column, written
    /// independently of the kernel code path.
    pub(crate) fn column_oracle(pixel: f32, p: &SnnParams) -> ([f32; 3], [u32; 3]) {
        let mut v = [p.v_rest; 3];
        let mut sum = [0u32; 3];
        let alpha = p.dt / p.tau_m;
        let i_s = pixel * p.p2c;
        for _ in 0..p.steps {
            let cand = v[0] + alpha * (-(v[0] - p.v_rest) + p.r_m * i_s);
            if cand >= p.v_thresh {
                v[0] = p.v_reset;
                sum[0] += 1;
            } else {
                v[0] = cand;
            }

            let i_l2 = sum[0] as f32 * p.s2c;
            let cand = v[1] + alpha * (-(v[1] - p.v_rest) + p.r_m * i_l2);
            if cand >= p.v_thresh {
                v[1] = p.v_reset;
                sum[1] += 1;
            } else {
                v[1] = cand;
            }

            let i_l3 = sum[1] as f32 * p.s2c;
            let cand = v[2] + alpha * (-(v[2] - p.v_rest) + p.r_m * (i_l2 + i_l3));
            if cand >= p.v_thresh {
                v[2] = p.v_reset;
                sum[2] += 1;
            } else {
                v[2] = cand;
            }
        }
        (v, sum)
    }

    fn single_pixel_state(p: &SnnParams) -> SnnState {
        SnnState::new(1, 1, p).unwrap()
    }

    #[test]
    fn lif_rest_is_a_fixed_point() {
        let p = SnnParams::default();
        assert_eq!(lif_step(p.v_rest, 0.0, &p), (p.v_rest, false));
    }

    #[test]
    fn lif_first_spike_step_seven_for_constant_two() {
        let p = SnnParams::default();

        // Independent recurrence: v_n = 0.9 v_{n-1} + 0.1 * 2.0 from rest.
        let mut v_oracle = 0.0f32;
        let mut first_spike = 0;
        for step in 1..=20 {
            v_oracle = 0.9 * v_oracle + 0.1 * 2.0;
            if v_oracle >= 1.0 {
                first_spike = step;
                break;
            }
        }
        assert_eq!(first_spike, 7);

        let mut v = p.v_rest;
        for step in 1..=7 {
            let (next, spiked) = lif_step(v, 2.0, &p);
            v = next;
            assert_eq!(spiked, step == 7, "step {step}");
        }
        assert_eq!(v, p.v_reset);
    }

    #[test]
    fn lif_crossing_forces_reset() {
        let p = SnnParams::default();
        let (v, spiked) = lif_step(0.99, 50.0, &p);
        assert!(spiked);
        assert_eq!(v, p.v_reset);
    }

    #[test]
    fn zero_buffer_yields_zero_grid() {
        let p = SnnParams::default();
        let mut state = SnnState::new(4, 3, &p).unwrap();
        let buffer = KernelBuffer::new(vec![0.0; 12]);
        let grid = snn_frame_v1(&buffer, &p, &mut state).unwrap();
        assert!(grid.sums().iter().all(|&s| s == 0));
    }

    #[test]
    fn kernel_matches_column_oracle_for_reference_inputs() {
        let p = SnnParams::default();
        for pixel in [0.0f32, 64.0, 128.0, 255.0] {
            let mut state = single_pixel_state(&p);
            let buffer = KernelBuffer::new(vec![pixel]);
            let grid = snn_frame_v1(&buffer, &p, &mut state).unwrap();
            let (v, sum) = column_oracle(pixel, &p);
            assert_eq!(grid.sums()[0], sum[2], "pixel {pixel}");
            assert_eq!(state.spike_sums(0)[0], sum[0], "pixel {pixel}");
            assert_eq!(state.spike_sums(1)[0], sum[1], "pixel {pixel}");
            assert_eq!(state.potentials(0)[0], v[0], "pixel {pixel}");
            assert_eq!(state.potentials(1)[0], v[1], "pixel {pixel}");
            assert_eq!(state.potentials(2)[0], v[2], "pixel {pixel}");
        }
    }

    #[test]
    fn full_intensity_pixel_fires_layer_three_at_defaults() {
        let p = SnnParams::default();
        let mut state = single_pixel_state(&p);
        let buffer = KernelBuffer::new(vec![255.0]);
        let grid = snn_frame_v1(&buffer, &p, &mut state).unwrap();
        // Layer 1 fires at steps 3, 6, 9; layers 2 and 3 both cross at step 10.
        assert_eq!(state.spike_sums(0)[0], 3);
        assert_eq!(state.spike_sums(1)[0], 1);
        assert_eq!(grid.sums()[0], 1);
    }

    #[test]
    fn only_the_driven_pixel_fires() {
        let p = SnnParams::default();
        let mut state = SnnState::new(3, 3, &p).unwrap();
        let mut values = vec![0.0f32; 9];
        values[4] = 255.0;
        let grid = snn_frame_v1(&KernelBuffer::new(values), &p, &mut state).unwrap();
        let (_, expected) = column_oracle(255.0, &p);
        for (i, &s) in grid.sums().iter().enumerate() {
            assert_eq!(s, if i == 4 { expected[2] } else { 0 });
        }
    }

    #[test]
    fn outputs_are_a_pure_per_pixel_function() {
        let p = SnnParams::default();
        let values: Vec<f32> = (0..16).map(|i| (i * 16) as f32).collect();
        let mut state = SnnState::new(4, 4, &p).unwrap();
        let grid = snn_frame_v1(&KernelBuffer::new(values.clone()), &p, &mut state).unwrap();

        // Reversing the buffer reverses the grid.
        let reversed: Vec<f32> = values.iter().rev().copied().collect();
        let mut state2 = SnnState::new(4, 4, &p).unwrap();
        let grid2 = snn_frame_v1(&KernelBuffer::new(reversed), &p, &mut state2).unwrap();
        let mut expected = grid.sums().to_vec();
        expected.reverse();
        assert_eq!(grid2.sums(), &expected[..]);
    }

    #[test]
    fn v2_matches_v1_after_reset() {
        let p = SnnParams::default();
        let values: Vec<f32> = (0..64)
            .map(|i| if i % 3 == 0 { 0.0 } else { (i * 4) as f32 })
            .collect();
        let buffer = KernelBuffer::new(values);
        let mut s1 = SnnState::new(8, 8, &p).unwrap();
        let mut s2 = SnnState::new(8, 8, &p).unwrap();
        let g1 = snn_frame_v1(&buffer, &p, &mut s1).unwrap();
        let g2 = snn_frame_v2(&buffer, &p, &mut s2).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(s1, s2);
    }

    #[test]
    fn v2_skips_non_positive_pixels() {
        let p = SnnParams {
            v_rest: 0.25,
            ..SnnParams::default()
        };
        let mut state = SnnState::new(2, 1, &p).unwrap();
        let buffer = KernelBuffer::new(vec![0.0, 255.0]);
        snn_frame_v2(&buffer, &p, &mut state).unwrap();
        // The skipped column is untouched.
        assert_eq!(state.potentials(0)[0], 0.25);
        assert_eq!(state.spike_sums(0)[0], 0);
        assert!(state.spike_sums(0)[1] > 0);
    }

    #[test]
    fn layer1_sum_is_monotone_in_input() {
        let p = SnnParams::default();
        let mut prev = 0u32;
        for value in 0..=255u32 {
            let mut state = single_pixel_state(&p);
            let buffer = KernelBuffer::new(vec![value as f32]);
            snn_frame_v1(&buffer, &p, &mut state).unwrap();
            let sum = state.spike_sums(0)[0];
            assert!(
                sum >= prev,
                "sum dropped from {prev} to {sum} at input {value}"
            );
            prev = sum;
        }
    }

    #[test]
    fn spike_sums_never_exceed_steps() {
        let p = SnnParams {
            p2c: 10.0,
            s2c: 10.0,
            ..SnnParams::default()
        };
        let mut state = single_pixel_state(&p);
        let buffer = KernelBuffer::new(vec![255.0]);
        snn_frame_v1(&buffer, &p, &mut state).unwrap();
        for layer in 0..3 {
            assert!(state.spike_sums(layer)[0] <= p.steps);
        }
    }

    #[test]
    fn lanes_do_not_change_the_result() {
        let p = SnnParams::default();
        let values: Vec<f32> = (0..100).map(|i| ((i * 37) % 256) as f32).collect();
        let buffer = KernelBuffer::new(values);

        let mut reference = SnnState::new(10, 10, &p).unwrap();
        let expected = run_parallel(Kernel::V1, &buffer, &p, &mut reference, 1).unwrap();
        for lanes in [2usize, 4, 8, 16] {
            let mut state = SnnState::new(10, 10, &p).unwrap();
            let grid = run_parallel(Kernel::V1, &buffer, &p, &mut state, lanes).unwrap();
            assert_eq!(grid, expected, "lanes {lanes}");
            assert_eq!(state, reference, "lanes {lanes}");
        }
    }

    #[test]
    fn non_power_of_two_lanes_are_rejected() {
        let p = SnnParams::default();
        let mut state = SnnState::new(2, 2, &p).unwrap();
        let buffer = KernelBuffer::new(vec![0.0; 4]);
        let err = run_parallel(Kernel::V1, &buffer, &p, &mut state, 48).unwrap_err();
        assert!(err.to_string().contains("power of two"));
        assert!(matches!(
            run_parallel(Kernel::V1, &buffer, &p, &mut state, 0),
            Err(Error::BadLaneCount(0))
        ));
    }

    #[test]
    fn buffer_length_mismatch_is_rejected() {
        let p = SnnParams::default();
        let mut state = SnnState::new(2, 2, &p).unwrap();
        let buffer = KernelBuffer::new(vec![0.0; 3]);
        assert!(matches!(
            snn_frame_v1(&buffer, &p, &mut state),
            Err(Error::BufferLength {
                buffer: 3,
                state: 4
            })
        ));
    }

    #[test]
    fn reset_is_idempotent_and_silences_zero_input() {
        let p = SnnParams::default();
        let mut state = SnnState::new(2, 2, &p).unwrap();
        snn_frame_v1(&KernelBuffer::new(vec![255.0; 4]), &p, &mut state).unwrap();
        state.reset(&p);
        let snapshot = state.clone();
        state.reset(&p);
        assert_eq!(state, snapshot);
        assert!(state.spike_sums(2).iter().all(|&s| s == 0));

        let grid = snn_frame_v1(&KernelBuffer::new(vec![0.0; 4]), &p, &mut state).unwrap();
        assert!(grid.sums().iter().all(|&s| s == 0));
    }

    #[test]
    fn kernel_parses_from_str() {
        assert_eq!("v1".parse::<Kernel>().unwrap(), Kernel::V1);
        assert_eq!("v2".parse::<Kernel>().unwrap(), Kernel::V2);
        assert!("v3".parse::<Kernel>().is_err());
    }
}
