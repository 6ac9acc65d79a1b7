//! sRGB transfer, 8-bit quantization and luminance.

/// Rec. 709 luma weights.
pub const LUMA: [f64; 3] = [0.2126, 0.7152, 0.0722];

pub fn srgb_encode(linear: f64) -> f64 {
    let c = linear.clamp(0.0, 1.0);
    if c <= 0.003_130_8 {
        12.92 * c
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    }
}

pub fn srgb_decode(encoded: f64) -> f64 {
    let c = encoded.clamp(0.0, 1.0);
    if c <= 0.040_45 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

/// Round-half-up quantization of an encoded value in [0, 1].
pub fn quantize(encoded: f64) -> u8 {
    (encoded.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

/// Linear value -> 8-bit sRGB code.
pub fn encode_u8(linear: f64) -> u8 {
    quantize(srgb_encode(linear))
}

/// Luminance of an 8-bit RGB triple, in [0, 1].
pub fn pixel_luminance(rgb: &[u8]) -> f64 {
    (LUMA[0] * f64::from(rgb[0]) + LUMA[1] * f64::from(rgb[1]) + LUMA[2] * f64::from(rgb[2])) / 255.0
}

/// Mean luminance over a row-major RGB buffer.
pub fn mean_luminance(pixels: &[u8]) -> f64 {
    let n = pixels.len() / 3;
    if n == 0 {
        return 0.0;
    }
    pixels.chunks_exact(3).map(pixel_luminance).sum::<f64>() / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_decode_round_trip() {
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            assert!((srgb_decode(srgb_encode(x)) - x).abs() < 1e-12);
        }
    }

    #[test]
    fn known_codes() {
        assert_eq!(encode_u8(0.0), 0);
        assert_eq!(encode_u8(1.0), 255);
        // mid-gray 0.5 linear encodes to 0.7354 -> 187.5 -> 188
        assert_eq!(encode_u8(0.5), 188);
        assert_eq!(encode_u8(srgb_decode(128.0 / 255.0)), 128);
        assert_eq!(quantize(0.5 / 255.0), 1);
    }

    #[test]
    fn luminance_of_gray_is_its_code() {
        for v in [0u8, 1, 85, 128, 200, 255] {
            assert!((pixel_luminance(&[v, v, v]) - f64::from(v) / 255.0).abs() < 1e-12);
        }
    }
}
