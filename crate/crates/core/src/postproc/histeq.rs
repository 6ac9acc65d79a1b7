use crate::render::Frame;

/// Integer luminance code, `round(Y * 255)` with Rec. 709 weights in
/// fixed point.
pub fn luminance_code(rgb: &[u8]) -> u8 {
    let sum = 2126 * u32::from(rgb[0]) + 7152 * u32::from(rgb[1]) + 722 * u32::from(rgb[2]);
    ((sum + 5000) / 10_000) as u8
}

/// Moves a pixel to luminance code `target`, keeping its chroma roughly
/// proportional. The result's `luminance_code` equals `target` exactly.
fn retarget(rgb: [u8; 3], current: u8, target: u8) -> [u8; 3] {
    if current == target {
        return rgb;
    }
    let mut px = if current == 0 {
        [target; 3]
    } else {
        let s = f64::from(target) / f64::from(current);
        rgb.map(|c| (f64::from(c) * s).round().clamp(0.0, 255.0) as u8)
    };
    // G, R, B in order of weight; each unit step moves the code by at most one
    const ORDER: [usize; 3] = [1, 0, 2];
    loop {
        let code = luminance_code(&px);
        if code == target {
            return px;
        }
        let up = code < target;
        let channel = ORDER
            .iter()
            .copied()
            .find(|&c| if up { px[c] < 255 } else { px[c] > 0 })
            .expect("luminance is bounded by all-0 and all-255");
        if up {
            px[channel] += 1;
        } else {
            px[channel] -= 1;
        }
    }
}

/// Histogram equalization of the luminance channel:
/// `h(v) = round((cdf(v) - cdf_min) / (N - cdf_min) * 255)`, with each pixel's
/// RGB rescaled to hit its new luminance. A single-level frame is returned
/// unchanged.
pub fn equalize_histogram(frame: &Frame) -> Frame {
    let codes: Vec<u8> = frame.pixels.chunks_exact(3).map(luminance_code).collect();
    let mut hist = [0u64; 256];
    for &c in &codes {
        hist[c as usize] += 1;
    }
    let n = codes.len() as u64;
    let mut cdf = [0u64; 256];
    let mut acc = 0;
    for (v, h) in hist.iter().enumerate() {
        acc += h;
        cdf[v] = acc;
    }
    let cdf_min = hist.iter().copied().find(|&h| h > 0).unwrap_or(0);
    if cdf_min == n {
        return frame.clone();
    }
    let denom = (n - cdf_min) as f64;
    let map: [u8; 256] = std::array::from_fn(|v| {
        let num = cdf[v].saturating_sub(cdf_min) as f64;
        (num / denom * 255.0).round() as u8
    });
    let mut pixels = Vec::with_capacity(frame.pixels.len());
    for (px, &code) in frame.pixels.chunks_exact(3).zip(&codes) {
        pixels.extend(retarget([px[0], px[1], px[2]], code, map[code as usize]));
    }
    Frame {
        pixels,
        ..frame.clone()
    }
}
