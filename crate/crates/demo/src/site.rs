//! Generated demo site: three images (two signed and annotated) and a
//! chunk-signed synthetic video.

use std::collections::HashMap;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use image::{ImageBuffer, ImageFormat, Rgb};
use newscert_core::{
    certificate_to_pem, issue_demo_chain, private_key_to_pem, EndorsementMetadata,
    DEFAULT_CHUNK_SIZE,
};
use newscert_signer::sign::sign_with;
use newscert_signer::{annotate_html, Credentials, SignRequest};
use rand::rngs::StdRng;
use rand::{RngCore, SeedableRng};

use crate::error::{DemoError, DemoResult};

pub const ENDORSER_NAME: &str = "Example News";

const WIDTH: u32 = 320;
const HEIGHT: u32 = 200;
const VIDEO_LEN: usize = 4 * (1 << 20) + 123;

/// Layout of a generated demo directory.
#[derive(Debug, Clone)]
pub struct DemoSite {
    /// Web root: pages, media and sidecars.
    pub site_dir: PathBuf,
    /// Holds `root.pem`, the only certificate a verifier needs to trust.
    pub trust_dir: PathBuf,
    /// Endorser key and certificate, for signing further assets.
    pub keys_dir: PathBuf,
    pub signed_images: Vec<String>,
    pub unsigned_images: Vec<String>,
    pub video: String,
}

/// Writes the demo under `out`: `site/`, `trust/` and `keys/`. Media and HTML
/// are deterministic; keys and therefore sidecars change on every run.
pub fn build_demo_site(out: &Path) -> DemoResult<DemoSite> {
    let site_dir = out.join("site");
    let trust_dir = out.join("trust");
    let keys_dir = out.join("keys");
    for dir in [&site_dir, &trust_dir, &keys_dir] {
        std::fs::create_dir_all(dir).map_err(|e| DemoError::io(dir, e))?;
    }

    let chain = issue_demo_chain(ENDORSER_NAME)?;
    write(
        &trust_dir.join("root.pem"),
        certificate_to_pem(chain.root_der()).as_bytes(),
    )?;
    write(
        &keys_dir.join("endorser.pem"),
        certificate_to_pem(chain.endorser_der()).as_bytes(),
    )?;
    write(
        &keys_dir.join("endorser.key.pem"),
        private_key_to_pem(chain.endorser_key()).as_bytes(),
    )?;
    let creds = Credentials::new(chain.endorser_key().clone(), chain.endorser_der().to_vec())?;

    let images = ["photo-1.png", "photo-2.png", "photo-3.png"];
    for (i, name) in images.iter().enumerate() {
        write(&site_dir.join(name), &render_image(i)?)?;
    }
    let mut mapping = HashMap::new();
    for (i, name) in images[..2].iter().enumerate() {
        let req = SignRequest {
            asset_path: site_dir.join(name),
            metadata: photo_metadata(i),
            key_path: PathBuf::new(),
            cert_chain_path: PathBuf::new(),
            output_path: None,
            chunk_size: None,
        };
        sign_with(&req, &creds)?;
        mapping.insert(name.to_string(), format!("{name}.xmp"));
    }
    let index = annotate_html(&index_html(&images), &mapping)?;
    write(&site_dir.join("index.html"), index.as_bytes())?;

    let video = "clip.mp4";
    write(&site_dir.join(video), &synthetic_video())?;
    let req = SignRequest {
        asset_path: site_dir.join(video),
        metadata: video_metadata(),
        key_path: PathBuf::new(),
        cert_chain_path: PathBuf::new(),
        output_path: None,
        chunk_size: Some(DEFAULT_CHUNK_SIZE),
    };
    sign_with(&req, &creds)?;
    let mapping = HashMap::from([(video.to_owned(), format!("{video}.xmp"))]);
    write(
        &site_dir.join("video.html"),
        annotate_html(VIDEO_PAGE, &mapping)?.as_bytes(),
    )?;

    Ok(DemoSite {
        site_dir,
        trust_dir,
        keys_dir,
        signed_images: images[..2].iter().map(|s| s.to_string()).collect(),
        unsigned_images: vec![images[2].to_owned()],
        video: video.to_owned(),
    })
}

fn write(path: &Path, bytes: &[u8]) -> DemoResult<()> {
    std::fs::write(path, bytes).map_err(|e| DemoError::io(path, e))
}

fn photo_metadata(i: usize) -> EndorsementMetadata {
    let (date_time, city, region, headline, description) = [
        (
            "2020-06-01T19:42:00-04:00",
            "Orlando",
            "Florida",
            "Evening sky over Lake Eola",
            "Clouds clear after an afternoon thunderstorm.",
        ),
        (
            "2020-06-02T08:15:00-04:00",
            "Tampa",
            "Florida",
            "Harbor at low tide",
            "Fishing boats wait for the tide at the Channel District.",
        ),
    ][i];
    EndorsementMetadata {
        date_time: date_time.into(),
        city: city.into(),
        region: region.into(),
        country: "United States".into(),
        creator: "Staff Photographer".into(),
        headline: headline.into(),
        description: description.into(),
    }
}

fn video_metadata() -> EndorsementMetadata {
    EndorsementMetadata {
        date_time: "2020-06-03T12:00:00-04:00".into(),
        city: "Miami".into(),
        region: "Florida".into(),
        country: "United States".into(),
        creator: "Video Desk".into(),
        headline: "Synthetic test clip".into(),
        description: "Procedurally generated bytes used to exercise chunked verification.".into(),
    }
}

fn render_image(variant: usize) -> DemoResult<Vec<u8>> {
    let img = ImageBuffer::from_fn(WIDTH, HEIGHT, |x, y| {
        let (fx, fy) = (x as f32 / WIDTH as f32, y as f32 / HEIGHT as f32);
        match variant {
            // Dusk gradient with a sun disc.
            0 => {
                let d = ((fx - 0.7).powi(2) + (fy - 0.35).powi(2)).sqrt();
                if d < 0.08 {
                    Rgb([255, 220, 120])
                } else {
                    Rgb([
                        (60.0 + 180.0 * fy) as u8,
                        (40.0 + 80.0 * fy) as u8,
                        (120.0 - 60.0 * fy) as u8,
                    ])
                }
            }
            // Water stripes under a pale sky.
            1 => {
                if fy < 0.4 {
                    Rgb([200, 220, 235])
                } else {
                    let wave = ((fx * 40.0 + fy * 90.0).sin() * 20.0) as i32;
                    Rgb([20, (90 + wave) as u8, (140 + wave) as u8])
                }
            }
            // Checkerboard.
            _ => {
                if (x / 20 + y / 20) % 2 == 0 {
                    Rgb([230, 230, 230])
                } else {
                    Rgb([40, 40, 40])
                }
            }
        }
    });
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, ImageFormat::Png)
        .map_err(|e| DemoError::Image(e.to_string()))?;
    Ok(out.into_inner())
}

fn synthetic_video() -> Vec<u8> {
    let mut bytes = vec![0u8; VIDEO_LEN];
    StdRng::seed_from_u64(0x6e65_7773).fill_bytes(&mut bytes);
    bytes[..12].copy_from_slice(b"\0\0\0\x18ftypisom");
    bytes
}

fn index_html(images: &[&str]) -> String {
    let mut html = String::from(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>Example News: Florida weather</title>\n</head>\n<body>\n<h1>Florida weather</h1>\n",
    );
    let captions = [
        "Evening sky over Lake Eola",
        "Harbor at low tide",
        "Reader submission (not endorsed)",
    ];
    for (name, caption) in images.iter().zip(captions) {
        html.push_str(&format!(
            "<figure>\n<img src=\"{name}\" width=\"{WIDTH}\" height=\"{HEIGHT}\" alt=\"{caption}\">\n<figcaption>{caption}</figcaption>\n</figure>\n"
        ));
    }
    html.push_str("<p><a href=\"video.html\">Video</a></p>\n</body>\n</html>\n");
    html
}

const VIDEO_PAGE: &str = "<!DOCTYPE html>
<html lang=\"en\">
<head>
<meta charset=\"utf-8\">
<title>Example News: video</title>
</head>
<body>
<video src=\"clip.mp4\" controls></video>
</body>
</html>
";
