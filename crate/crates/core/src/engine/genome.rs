use crate::quaternion::Quaternion;
use crate::scalar::Real;

use super::{BoundPolicy, EngineError};

/// How a real vector maps onto quaternion blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockLayout {
    /// `D = 3`: one block `(0, x₁, x₂, x₃)`; decode reads only the imaginary part.
    Embedded3,
    /// `D = 4m`: `m` consecutive `(w, x, y, z)` blocks.
    Blocks(usize),
}

impl BlockLayout {
    pub fn for_dimension(dimension: usize) -> Result<Self, EngineError> {
        match dimension {
            3 => Ok(BlockLayout::Embedded3),
            d if d > 0 && d % 4 == 0 => Ok(BlockLayout::Blocks(d / 4)),
            d => Err(EngineError::UnsupportedDimension(d)),
        }
    }

    pub fn block_count(self) -> usize {
        match self {
            BlockLayout::Embedded3 => 1,
            BlockLayout::Blocks(m) => m,
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            BlockLayout::Embedded3 => 3,
            BlockLayout::Blocks(m) => 4 * m,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Genome<T> {
    pub blocks: Vec<Quaternion<T>>,
    pub fitness: Option<T>,
}

impl<T: Real> Genome<T> {
    pub fn new(blocks: Vec<Quaternion<T>>) -> Self {
        Self { blocks, fitness: None }
    }

    pub fn decode(&self, layout: BlockLayout) -> Vec<T> {
        decode_blocks(&self.blocks, layout)
    }

    /// Repairs the coordinates that decode reads; stored real parts of an
    /// embedded 3-D block are left alone.
    pub fn repair(&mut self, layout: BlockLayout, bounds: (T, T), policy: BoundPolicy) {
        for b in self.blocks.iter_mut() {
            if layout != BlockLayout::Embedded3 {
                b.w = repair_scalar(b.w, bounds, policy);
            }
            b.x = repair_scalar(b.x, bounds, policy);
            b.y = repair_scalar(b.y, bounds, policy);
            b.z = repair_scalar(b.z, bounds, policy);
        }
    }
}

pub fn encode<T: Real>(x: &[T]) -> Result<Vec<Quaternion<T>>, EngineError> {
    match BlockLayout::for_dimension(x.len())? {
        BlockLayout::Embedded3 => Ok(vec![Quaternion::pure([x[0], x[1], x[2]])]),
        BlockLayout::Blocks(_) => Ok(x.chunks_exact(4).map(|c| Quaternion::new(c[0], c[1], c[2], c[3])).collect()),
    }
}

pub fn decode<T: Real>(blocks: &[Quaternion<T>], dimension: usize) -> Result<Vec<T>, EngineError> {
    let layout = BlockLayout::for_dimension(dimension)?;
    if blocks.len() != layout.block_count() {
        return Err(EngineError::LengthMismatch { expected: layout.block_count(), actual: blocks.len() });
    }
    Ok(decode_blocks(blocks, layout))
}

pub(crate) fn decode_blocks<T: Real>(blocks: &[Quaternion<T>], layout: BlockLayout) -> Vec<T> {
    match layout {
        BlockLayout::Embedded3 => blocks[0].imag().to_vec(),
        BlockLayout::Blocks(_) => blocks.iter().flat_map(|b| b.to_array()).collect(),
    }
}

/// Brings every coordinate of `x` back into `[lo, hi]`.
pub fn repair_bounds<T: Real>(x: &[T], bounds: (T, T), policy: BoundPolicy) -> Vec<T> {
    x.iter().map(|&v| repair_scalar(v, bounds, policy)).collect()
}

pub(crate) fn repair_scalar<T: Real>(v: T, (lo, hi): (T, T), policy: BoundPolicy) -> T {
    if v >= lo && v <= hi {
        return v;
    }
    if v.is_nan() {
        return (lo + hi) / T::lit(2.0);
    }
    if v.is_infinite() {
        return if v > T::zero() { hi } else { lo };
    }
    match policy {
        BoundPolicy::Clamp => v.max(lo).min(hi),
        BoundPolicy::Reflect => {
            let width = hi - lo;
            let period = width + width;
            let mut y = (v - lo) % period;
            if y < T::zero() {
                y = y + period;
            }
            if y > width {
                y = period - y;
            }
            (lo + y).max(lo).min(hi)
        }
    }
}
