//! Deterministic synthetic gray textures.
//!
//! Used as M1 cover images when no natural covers are supplied, and as a
//! desk-scale stand-in corpus for evaluation. A texture is bilinear value
//! noise over two lattices (8 px and 3 px cells) plus a little per-pixel
//! grain, all drawn from one SplitMix64 stream, so it has the smooth
//! structure of a natural image rather than white noise.

use crate::rng::SplitMix64;
use crate::GrayImage;

struct Lattice {
    cols: usize,
    values: Vec<f64>,
    cell: f64,
}

impl Lattice {
    fn new(rng: &mut SplitMix64, width: u32, height: u32, cell: u32) -> Self {
        let cols = (width / cell) as usize + 2;
        let rows = (height / cell) as usize + 2;
        let values = (0..cols * rows)
            .map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
            .collect();
        Self {
            cols,
            values,
            cell: cell as f64,
        }
    }

    fn sample(&self, x: u32, y: u32) -> f64 {
        let fx = x as f64 / self.cell;
        let fy = y as f64 / self.cell;
        let (cx, cy) = (fx.floor() as usize, fy.floor() as usize);
        let (tx, ty) = (fx - cx as f64, fy - cy as f64);
        let at = |c: usize, r: usize| self.values[r * self.cols + c];
        let top = at(cx, cy) * (1.0 - tx) + at(cx + 1, cy) * tx;
        let bottom = at(cx, cy + 1) * (1.0 - tx) + at(cx + 1, cy + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}

pub fn textured_image(width: u32, height: u32, seed: u64) -> GrayImage {
    let mut rng = SplitMix64::new(seed);
    let coarse = Lattice::new(&mut rng, width, height, 8);
    let fine = Lattice::new(&mut rng, width, height, 3);
    GrayImage::from_fn(width, height, |x, y| {
        let grain = (rng.next_u64() >> 56) as f64 / 255.0;
        let v = 0.65 * coarse.sample(x, y) + 0.25 * fine.sample(x, y) + 0.10 * grain;
        (v * 255.0).round().clamp(0.0, 255.0) as u8
    })
    .expect("texture dimensions are positive")
}
