//! Binary PPM frames and 16-bit PGM raster dumps.

use std::io::{self, Write};

use hfcast_core::{CascadeRaster, Frame, Layer};

/// `P6` with maxval 255.
pub fn write_ppm<W: Write>(mut w: W, frame: &Frame) -> io::Result<()> {
    write!(w, "P6\n{} {}\n255\n", frame.width, frame.height)?;
    w.write_all(&frame.pixels)?;
    w.flush()
}

pub fn encode_ppm(frame: &Frame) -> Vec<u8> {
    let mut out = Vec::with_capacity(frame.pixels.len() + 32);
    write_ppm(&mut out, frame).expect("writing to a Vec cannot fail");
    out
}

/// Quantizes one layer of a cascade to 16 bits over `range`. Invalid texels
/// are 0; valid heights map to `1..=65535`. Row 0 of the image is the
/// largest y, so north is up.
pub fn raster_to_gray16(raster: &CascadeRaster, layer: Layer, range: (f64, f64)) -> Vec<u16> {
    let res = raster.resolution();
    let span = range.1 - range.0;
    let mut out = Vec::with_capacity(res * res);
    for iy in (0..res).rev() {
        for ix in 0..res {
            if !raster.is_valid(ix, iy) {
                out.push(0);
                continue;
            }
            let t = if span > 0.0 { (raster.height(layer, ix, iy) - range.0) / span } else { 0.5 };
            out.push(1 + (t.clamp(0.0, 1.0) * 65534.0).round() as u16);
        }
    }
    out
}

/// `P5` with maxval 65535, big-endian samples.
pub fn write_pgm16<W: Write>(mut w: W, width: usize, height: usize, samples: &[u16]) -> io::Result<()> {
    assert_eq!(samples.len(), width * height);
    write!(w, "P5\n{width} {height}\n65535\n")?;
    let bytes: Vec<u8> = samples.iter().flat_map(|s| s.to_be_bytes()).collect();
    w.write_all(&bytes)?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_layout() {
        let f = Frame { width: 2, height: 1, pixels: vec![1, 2, 3, 4, 5, 6], rays_hit: 0 };
        let b = encode_ppm(&f);
        assert_eq!(&b[..11], b"P6\n2 1\n255\n");
        assert_eq!(&b[11..], &[1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn pgm_is_big_endian() {
        let mut out = Vec::new();
        write_pgm16(&mut out, 2, 1, &[0x0102, 0xfffe]).unwrap();
        assert_eq!(&out[..13], b"P5\n2 1\n65535\n");
        assert_eq!(&out[13..], &[1, 2, 0xff, 0xfe]);
    }
}
