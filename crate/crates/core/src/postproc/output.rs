use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aesthetics::QualityScore;
use crate::error::{Error, Result};
use crate::optimize::ShootingParameters;
use crate::render::{CameraPose, Frame, FrameSequence};
use crate::time::{self, Timestamp};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub file: String,
    #[serde(with = "time::iso")]
    pub timestamp: Timestamp,
    pub pose: CameraPose,
    pub pre_gain_mean_luminance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub fps: f64,
    pub frames: Vec<FrameRecord>,
    pub params: ShootingParameters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<QualityScore>,
}

pub fn frame_file_name(index: usize) -> String {
    format!("frame_{index:06}.png")
}

/// PNG bytes of an 8-bit RGB frame.
pub fn encode_png(frame: &Frame) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_png(&mut out, frame).map_err(|e| Error::Image {
        path: "<memory>".into(),
        message: e.to_string(),
    })?;
    Ok(out)
}

fn write_png<W: Write>(w: W, frame: &Frame) -> std::result::Result<(), png::EncodingError> {
    let mut encoder = png::Encoder::new(w, frame.width, frame.height);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header()?;
    writer.write_image_data(&frame.pixels)?;
    writer.finish()
}

fn read_png(path: &Path) -> Result<(u32, u32, Vec<u8>)> {
    let image_err = |message: String| Error::Image {
        path: path.to_path_buf(),
        message,
    };
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = png::Decoder::new(BufReader::new(file))
        .read_info()
        .map_err(|e| image_err(e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| image_err("image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(|e| image_err(e.to_string()))?;
    if info.color_type != png::ColorType::Rgb || info.bit_depth != png::BitDepth::Eight {
        return Err(image_err(format!(
            "expected 8-bit RGB, found {:?} {:?}",
            info.color_type, info.bit_depth
        )));
    }
    buf.truncate(info.buffer_size());
    Ok((info.width, info.height, buf))
}

/// Writes `frame_%06d.png` files and `manifest.json` into `dir`, creating it
/// if needed.
pub fn write_output(frames: &FrameSequence, dir: impl AsRef<Path>) -> Result<Manifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut records = Vec::with_capacity(frames.frames.len());
    for (k, frame) in frames.frames.iter().enumerate() {
        let name = frame_file_name(k);
        let path = dir.join(&name);
        let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        write_png(BufWriter::new(file), frame).map_err(|e| Error::Image {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        records.push(FrameRecord {
            file: name,
            timestamp: frame.timestamp,
            pose: frame.pose,
            pre_gain_mean_luminance: frame.pre_gain_mean_luminance,
        });
    }
    let manifest = Manifest {
        fps: frames.fps_playback,
        frames: records,
        params: frames.params,
        score: frames.score,
    };
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Loads a sequence written by [`write_output`].
pub fn read_output(dir: impl AsRef<Path>) -> Result<FrameSequence> {
    let dir = dir.as_ref();
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let frames = manifest
        .frames
        .iter()
        .map(|rec| {
            let (width, height, pixels) = read_png(&dir.join(&rec.file))?;
            Ok(Frame {
                width,
                height,
                pixels,
                timestamp: rec.timestamp,
                pose: rec.pose,
                pre_gain_mean_luminance: rec.pre_gain_mean_luminance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let seq = FrameSequence {
        frames,
        params: manifest.params,
        fps_playback: manifest.fps,
        score: manifest.score,
    };
    seq.validate()?;
    Ok(seq)
}
