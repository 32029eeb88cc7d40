//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::alloc::{GlobalAlloc, Layout, System};
use std::cell::Cell;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::rc::Rc;
use std::time::{Duration, Instant, SystemTime};

use newscert_core::{
    canonical_message, compute_digest, decode_certificates, issue_demo_chain, load_private_key,
    parse_sidecar, serialize_sidecar, sign_endorsement, verify_digest_signature,
    verify_endorsement, ChunkEntry, ChunkSigner, DemoCa, EndorsementMetadata, MediaAsset,
    MetadataField, SidecarDocument, SignatureValue, SubjectName, TrustPolicy, TrustStore,
    ValidityWindow, VerificationStatus,
};
use newscert_demo::{build_demo_site, serve, ServeConfig};
use newscert_verifier::{crawl_page, load_trust_dir, verify_chunked_reader};
use rand::rngs::StdRng;
use rand::{Rng, RngCore, SeedableRng};

// Per-thread heap accounting, used to bound streaming memory.
struct CountingAlloc;

thread_local! {
    static LIVE: Cell<isize> = const { Cell::new(0) };
    static PEAK: Cell<isize> = const { Cell::new(0) };
}

fn account(delta: isize) {
    let _ = LIVE.try_with(|live| {
        let now = live.get() + delta;
        live.set(now);
        let _ = PEAK.try_with(|peak| peak.set(peak.get().max(now)));
    });
}

unsafe impl GlobalAlloc for CountingAlloc {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            account(layout.size() as isize);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        account(-(layout.size() as isize));
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = System.realloc(ptr, layout, new_size);
        if !p.is_null() {
            account(new_size as isize - layout.size() as isize);
        }
        p
    }
}

#[global_allocator]
static ALLOC: CountingAlloc = CountingAlloc;

/// Resets the peak and returns the current live byte count.
fn heap_mark() -> isize {
    let live = LIVE.with(Cell::get);
    PEAK.with(|p| p.set(live));
    live
}

fn heap_peak_since(mark: isize) -> isize {
    PEAK.with(Cell::get) - mark
}

type Check = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Check); 7] = [
        ("round-trip", round_trip),
        ("tamper", tamper),
        ("sidecar-format", sidecar_format),
        ("interop", interop),
        ("e2e-crawl", e2e_crawl),
        ("chunked-streaming", chunked_streaming),
        ("trust", trust),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const PIECES: &[&str] = &[
    "a",
    "Z",
    "7",
    " ",
    "\t",
    "\r",
    "<",
    ">",
    "&",
    "\"",
    "'",
    "é",
    "ß",
    "中",
    "文",
    "😀",
    "ñ",
    "€",
    "&amp;",
    "]]>",
    "Orlando",
    "2020-06-01T14:30:00Z",
];

fn random_text(rng: &mut StdRng, max_pieces: usize) -> String {
    let n = rng.gen_range(0..=max_pieces);
    (0..n)
        .map(|_| PIECES[rng.gen_range(0..PIECES.len())])
        .collect()
}

fn random_meta(rng: &mut StdRng) -> EndorsementMetadata {
    let mut meta = EndorsementMetadata::default();
    for field in MetadataField::ALL {
        *meta.get_mut(field) = random_text(rng, 12);
    }
    meta
}

fn random_bytes(rng: &mut StdRng, len: usize) -> Vec<u8> {
    let mut v = vec![0; len];
    rng.fill_bytes(&mut v);
    v
}

fn round_trip() -> Result<String, String> {
    let start = Instant::now();
    let chain = issue_demo_chain("Example News").map_err(|e| e.to_string())?;
    let trust = chain.trust_store(TrustPolicy::Strict);
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let mut total = 0usize;
    for i in 0..100 {
        let meta = random_meta(&mut rng);
        let len = rng.gen_range(0..=1 << 20);
        total += len;
        let media = MediaAsset::new(random_bytes(&mut rng, len), format!("fixture-{i}.jpg"));
        let doc =
            SidecarDocument::endorse(&meta, &media, chain.endorser_key(), chain.endorser_der())
                .map_err(|e| format!("fixture {i}: {e}"))?;
        let parsed =
            parse_sidecar(&serialize_sidecar(&doc)).map_err(|e| format!("fixture {i}: {e}"))?;
        let report = verify_endorsement(&parsed, &media, &trust);
        ensure(report.is_verified(), || {
            format!("fixture {i}: {} ({})", report.status, report.detail)
        })?;
        ensure(report.endorser_name() == Some("Example News"), || {
            format!("fixture {i}: wrong endorser")
        })?;
        ensure(report.metadata.as_ref() == Some(&meta), || {
            format!("fixture {i}: metadata changed")
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "100/100 Verified, {:.1} MiB media, {:.1}s (limit 60s)",
        total as f64 / (1 << 20) as f64,
        elapsed.as_secs_f64()
    ))
}

fn mutate(value: &str) -> String {
    match value.chars().next() {
        None => "x".into(),
        Some(c) => {
            let replacement = if c == 'x' { 'y' } else { 'x' };
            format!("{replacement}{}", &value[c.len_utf8()..])
        }
    }
}

fn tamper() -> Result<String, String> {
    let chain = issue_demo_chain("Example News").map_err(|e| e.to_string())?;
    let trust = chain.trust_store(TrustPolicy::Strict);
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let (mut rejected, mut attempts) = (0, 0);
    let mut accepted = Vec::new();
    for i in 0..50 {
        let meta = random_meta(&mut rng);
        let len = rng.gen_range(1..=64 * 1024);
        let media = random_bytes(&mut rng, len);
        let doc = SidecarDocument::endorse(
            &meta,
            &MediaAsset::new(media.clone(), ""),
            chain.endorser_key(),
            chain.endorser_der(),
        )
        .map_err(|e| e.to_string())?;
        let doc = parse_sidecar(&serialize_sidecar(&doc)).map_err(|e| e.to_string())?;
        ensure(
            verify_endorsement(&doc, &MediaAsset::new(media.clone(), ""), &trust).is_verified(),
            || format!("fixture {i} did not verify untampered"),
        )?;

        let mut flipped = media.clone();
        let bit = rng.gen_range(0..flipped.len() * 8);
        flipped[bit / 8] ^= 1 << (bit % 8);
        attempts += 1;
        match verify_endorsement(&doc, &MediaAsset::new(flipped, ""), &trust).status {
            VerificationStatus::Verified => accepted.push(format!("fixture {i} bit {bit}")),
            _ => rejected += 1,
        }

        for field in MetadataField::ALL {
            let mut forged = doc.clone();
            let value = forged.metadata.get(field).to_owned();
            *forged.metadata.get_mut(field) = mutate(&value);
            let forged = parse_sidecar(&serialize_sidecar(&forged)).map_err(|e| e.to_string())?;
            attempts += 1;
            match verify_endorsement(&forged, &MediaAsset::new(media.clone(), ""), &trust).status {
                VerificationStatus::Verified => {
                    accepted.push(format!("fixture {i} field {}", field.key()))
                }
                _ => rejected += 1,
            }
        }
    }
    ensure(accepted.is_empty() && rejected == 400, || {
        format!("{rejected}/{attempts} rejected, false accepts: {accepted:?}")
    })?;
    Ok(format!(
        "{rejected}/{attempts} tampered fixtures rejected, 0 false accepts"
    ))
}

fn random_doc(rng: &mut StdRng) -> SidecarDocument {
    use base64::Engine as _;
    let b64 = |bytes: Vec<u8>| base64::engine::general_purpose::STANDARD.encode(bytes);
    let chunks = rng.gen_bool(0.3).then(|| {
        let mut offset = 0;
        (0..rng.gen_range(1..6u64))
            .map(|index| {
                let len = rng.gen_range(1..1_000_000u64);
                let entry = ChunkEntry {
                    index,
                    byte_offset: offset,
                    byte_length: len,
                    digest_hex: hex_string(&random_bytes(rng, 32)),
                    signature_b64: b64(random_bytes(rng, 256)),
                };
                offset += len;
                entry
            })
            .collect()
    });
    let cert_len = rng.gen_range(1..900);
    SidecarDocument {
        metadata: random_meta(rng),
        digest_hex: hex_string(&random_bytes(rng, 32)),
        signature_b64: b64(random_bytes(rng, 256)),
        certificate_b64: b64(random_bytes(rng, cert_len)),
        chunks,
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn core_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests")
}

fn golden_meta() -> EndorsementMetadata {
    EndorsementMetadata {
        date_time: "2020-06-01T14:30:00-04:00".into(),
        city: "Orlando".into(),
        region: "Florida".into(),
        country: "United States".into(),
        creator: "Jane Q. Photographer".into(),
        headline: "Storm clouds over Lake Eola".into(),
        description: "A thunderstorm rolls in over downtown <Orlando> & the lake.".into(),
    }
}

fn golden_media(len: usize) -> Vec<u8> {
    (0..len as u32)
        .map(|i| (i.wrapping_mul(2654435761) >> 24) as u8)
        .collect()
}

fn sidecar_format() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let (mut utf8, mut special, mut chunked) = (0, 0, 0);
    for i in 0..200 {
        let doc = random_doc(&mut rng);
        let text = serialize_sidecar(&doc);
        ensure(text == serialize_sidecar(&doc), || {
            format!("doc {i}: serialization not deterministic")
        })?;
        let parsed = parse_sidecar(&text).map_err(|e| format!("doc {i}: {e}"))?;
        ensure(parsed == doc, || {
            format!("doc {i}: parse(serialize(doc)) != doc")
        })?;
        let values = doc.metadata.values().concat();
        utf8 += usize::from(!values.is_ascii());
        special += usize::from(values.contains(['<', '>', '&', '"', '\'']));
        chunked += usize::from(doc.is_chunked());
    }

    let fixtures = core_dir().join("fixtures");
    let key = load_private_key(
        &std::fs::read(fixtures.join("endorser.key.pem")).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let cert = decode_certificates(
        &std::fs::read(fixtures.join("endorser.pem")).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?
    .remove(0);
    let regenerated = [
        (
            "storm.jpg.xmp",
            SidecarDocument::endorse(
                &golden_meta(),
                &MediaAsset::new(golden_media(4096), ""),
                &key,
                &cert,
            ),
        ),
        (
            "clip.mp4.xmp",
            SidecarDocument::endorse_chunked(&golden_meta(), &golden_media(1000), 256, &key, &cert),
        ),
    ];
    for (name, doc) in regenerated {
        let doc = doc.map_err(|e| e.to_string())?;
        let golden = std::fs::read_to_string(core_dir().join("golden").join(name))
            .map_err(|e| format!("{name}: {e}"))?;
        ensure(serialize_sidecar(&doc) == golden, || {
            format!("{name} drifted from golden bytes")
        })?;
        let reparsed = parse_sidecar(&golden).map_err(|e| format!("{name}: {e}"))?;
        ensure(serialize_sidecar(&reparsed) == golden, || {
            format!("{name}: serialize(parse(golden)) != golden")
        })?;
    }
    Ok(format!(
        "200/200 identity ({utf8} multi-byte UTF-8, {special} XML-special, {chunked} chunked); 2 golden files byte-stable"
    ))
}

fn openssl(args: &[&str], dir: &Path) -> Result<Vec<u8>, String> {
    let out = Command::new("openssl")
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| format!("openssl not runnable: {e}"))?;
    ensure(out.status.success(), || {
        format!("openssl {args:?}: {}", String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(out.stdout)
}

fn interop() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = dir.path();
    let key_path = core_dir().join("fixtures/endorser.key.pem");
    let key_path = key_path.to_str().unwrap();
    let key = load_private_key(&std::fs::read(key_path).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    openssl(
        &["pkey", "-in", key_path, "-pubout", "-out", "pub.pem"],
        dir,
    )?;
    let public = key.to_public_key();
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);

    for i in 0..20 {
        let meta = random_meta(&mut rng);
        let len = rng.gen_range(0..100_000);
        let media = random_bytes(&mut rng, len);
        std::fs::write(dir.join("media.bin"), &media).map_err(|e| e.to_string())?;
        let b64 = openssl(&["base64", "-A", "-in", "media.bin"], dir)?;
        let mut preimage = Vec::new();
        for value in meta.values() {
            preimage.extend_from_slice(value.as_bytes());
            preimage.push(b'\n');
        }
        preimage.extend(b64.iter().filter(|b| !b.is_ascii_whitespace()));
        std::fs::write(dir.join("pre.bin"), &preimage).map_err(|e| e.to_string())?;
        let asset = MediaAsset::new(media, "");
        ensure(
            canonical_message(&meta, &asset).as_bytes() == preimage.as_slice(),
            || format!("case {i}: preimage differs"),
        )?;

        let digest = compute_digest(&meta, &asset);
        let theirs = String::from_utf8_lossy(&openssl(&["dgst", "-sha256", "-r", "pre.bin"], dir)?)
            .into_owned();
        ensure(
            theirs.split_whitespace().next() == Some(digest.to_hex().as_str()),
            || format!("case {i}: digest differs"),
        )?;

        let ours = sign_endorsement(&meta, &asset, &key).map_err(|e| e.to_string())?;
        std::fs::write(dir.join("ours.sig"), ours.raw()).map_err(|e| e.to_string())?;
        let verdict = openssl(
            &[
                "dgst",
                "-sha256",
                "-verify",
                "pub.pem",
                "-signature",
                "ours.sig",
                "pre.bin",
            ],
            dir,
        )?;
        ensure(
            String::from_utf8_lossy(&verdict).trim() == "Verified OK",
            || format!("case {i}: openssl rejected our signature"),
        )?;

        let theirs = openssl(&["dgst", "-sha256", "-sign", key_path, "pre.bin"], dir)?;
        ensure(theirs == ours.raw(), || {
            format!("case {i}: signatures differ")
        })?;
        ensure(
            verify_digest_signature(&digest, &SignatureValue::from_raw(theirs), &public),
            || format!("case {i}: openssl signature rejected here"),
        )?;
    }
    Ok(
        "20/20 preimages, digests and signatures identical to openssl; verified in both directions"
            .into(),
    )
}

fn e2e_crawl() -> Result<String, String> {
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let site = build_demo_site(out.path()).map_err(|e| e.to_string())?;
    let trust =
        load_trust_dir(&site.trust_dir, TrustPolicy::WarnOnExpiry).map_err(|e| e.to_string())?;
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    rt.block_on(async {
        let mut config = ServeConfig::new(&site.site_dir, "127.0.0.1:0".parse().unwrap());
        config.tamper = vec!["photo-2.png".into()];
        let server = serve(config).await.map_err(|e| e.to_string())?;
        let one = crawl_page(&server.url(), &trust, 1)
            .await
            .map_err(|e| e.to_string())?;
        let eight = crawl_page(&server.url(), &trust, 8)
            .await
            .map_err(|e| e.to_string())?;
        server.shutdown().await;

        ensure(one == eight, || {
            "reports differ between concurrency 1 and 8".into()
        })?;
        let s = one.summary;
        ensure(
            s.verified == 1 && s.failed == 1 && s.no_sidecar + s.malformed + s.untrusted == 0,
            || format!("summary {s:?}"),
        )?;
        ensure(one.entries.len() == 2, || {
            format!("{} entries", one.entries.len())
        })?;
        ensure(
            !one.entries
                .iter()
                .any(|e| e.asset_locator.ends_with("photo-3.png")),
            || "unannotated image reported".into(),
        )?;
        let tampered = one
            .entries
            .iter()
            .find(|e| e.asset_locator.ends_with("photo-2.png"));
        ensure(tampered.is_some_and(|e| e.status.is_failure()), || {
            "tampered image not failed".into()
        })?;
        Ok(
            "{Verified: 1, failed: 1}, unannotated asset absent, identical at concurrency 1 and 8"
                .into(),
        )
    })
}

const MIB: u64 = 1 << 20;

/// Deterministic pseudo-video generated on the fly, never held in memory.
struct SyntheticVideo {
    pos: u64,
    len: u64,
    flip_at: Option<u64>,
    swap_2_3: bool,
    consumed: Rc<Cell<u64>>,
}

impl SyntheticVideo {
    fn new(len: u64, flip_at: Option<u64>) -> Self {
        SyntheticVideo {
            pos: 0,
            len,
            flip_at,
            swap_2_3: false,
            consumed: Rc::new(Cell::new(0)),
        }
    }

    fn byte(&self, at: u64) -> u8 {
        let source = match at / MIB {
            2 if self.swap_2_3 => at + MIB,
            3 if self.swap_2_3 => at - MIB,
            _ => at,
        };
        let mut x = source.wrapping_add(0x9e37_79b9_7f4a_7c15);
        x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        let b = (x ^ (x >> 31)) as u8;
        if self.flip_at == Some(at) {
            b ^ 0x04
        } else {
            b
        }
    }
}

impl Read for SyntheticVideo {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let n = (self.len - self.pos).min(buf.len() as u64) as usize;
        for (i, slot) in buf[..n].iter_mut().enumerate() {
            *slot = self.byte(self.pos + i as u64);
        }
        self.pos += n as u64;
        self.consumed.set(self.pos);
        Ok(n)
    }
}

fn chunked_streaming() -> Result<String, String> {
    let chain = issue_demo_chain("Example News").map_err(|e| e.to_string())?;
    let trust = chain.trust_store(TrustPolicy::Strict);
    let meta = golden_meta();
    let total = 10 * MIB;

    let mut signer =
        ChunkSigner::new(&meta, MIB, chain.endorser_key()).map_err(|e| e.to_string())?;
    let mut source = SyntheticVideo::new(total, None);
    let mut buf = vec![0; 64 * 1024];
    loop {
        let n = source.read(&mut buf).map_err(|e| e.to_string())?;
        if n == 0 {
            break;
        }
        signer.update(&buf[..n]).map_err(|e| e.to_string())?;
    }
    let doc = signer
        .finish()
        .map_err(|e| e.to_string())?
        .into_sidecar(&meta, chain.endorser_der());
    let doc = parse_sidecar(&serialize_sidecar(&doc)).map_err(|e| e.to_string())?;
    drop(buf);

    // Untampered: incremental verdicts and bounded memory.
    let source = SyntheticVideo::new(total, None);
    let consumed = source.consumed.clone();
    let mark = heap_mark();
    let mut reader = verify_chunked_reader(source, &doc, &trust).map_err(|e| e.to_string())?;
    let mut emitted_at = Vec::new();
    let mut statuses = Vec::new();
    for item in reader.by_ref() {
        let verdict = item.map_err(|e| e.to_string())?;
        emitted_at.push(consumed.get());
        statuses.push(verdict.status);
    }
    let reader_peak = reader.peak_buffered();
    drop(reader);
    let heap_peak = heap_peak_since(mark);

    ensure(statuses.len() == 10, || {
        format!("{} verdicts", statuses.len())
    })?;
    ensure(
        statuses.iter().all(|s| *s == VerificationStatus::Verified),
        || format!("{statuses:?}"),
    )?;
    for (i, at) in emitted_at.iter().enumerate() {
        let end = (i as u64 + 1) * MIB;
        ensure(*at >= end && *at < end + 64 * 1024, || {
            format!("verdict {i} emitted after {at} bytes, chunk ends at {end}")
        })?;
    }
    ensure(heap_peak <= 2 * MIB as isize, || {
        format!("peak heap growth {heap_peak} bytes")
    })?;

    // Bit flip inside chunk 3.
    let flipped = SyntheticVideo::new(total, Some(3 * MIB + 4321));
    let statuses: Vec<_> = verify_chunked_reader(flipped, &doc, &trust)
        .map_err(|e| e.to_string())?
        .map(|v| v.map(|v| v.status))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let failed: Vec<_> = (0..statuses.len())
        .filter(|&i| statuses[i] != VerificationStatus::Verified)
        .collect();
    ensure(statuses.len() == 10 && failed == [3], || {
        format!("bit flip in chunk 3 failed chunks {failed:?}")
    })?;

    // Signatures of chunks 2 and 3 swapped.
    let mut swapped = doc.clone();
    let chunks = swapped.chunks.as_mut().unwrap();
    let sig2 = chunks[2].signature_b64.clone();
    chunks[2].signature_b64 = std::mem::replace(&mut chunks[3].signature_b64, sig2);
    let statuses: Vec<_> =
        verify_chunked_reader(SyntheticVideo::new(total, None), &swapped, &trust)
            .map_err(|e| e.to_string())?
            .map(|v| v.map(|v| v.status))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
    let failed: Vec<_> = (0..statuses.len())
        .filter(|&i| statuses[i] != VerificationStatus::Verified)
        .collect();
    ensure(failed == [2, 3], || {
        format!("signature swap 2<->3 failed chunks {failed:?}")
    })?;

    // Payloads of chunks 2 and 3 swapped in the stream.
    let mut reordered = SyntheticVideo::new(total, None);
    reordered.swap_2_3 = true;
    let statuses: Vec<_> = verify_chunked_reader(reordered, &doc, &trust)
        .map_err(|e| e.to_string())?
        .map(|v| v.map(|v| v.status))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let failed: Vec<_> = (0..statuses.len())
        .filter(|&i| statuses[i] != VerificationStatus::Verified)
        .collect();
    ensure(failed == [2, 3], || {
        format!("payload swap 2<->3 failed chunks {failed:?}")
    })?;

    Ok(format!(
        "10 incremental verdicts; peak heap growth {:.0} KiB, read buffer {} KiB (limit {} KiB); flip in chunk 3 fails only 3; signature or payload swap 2<->3 fails 2 and 3",
        heap_peak as f64 / 1024.0,
        reader_peak / 1024,
        2 * MIB / 1024
    ))
}

fn trust() -> Result<String, String> {
    let chain = issue_demo_chain("Example News").map_err(|e| e.to_string())?;
    let media = MediaAsset::new(golden_media(2048), "t.jpg");
    let meta = golden_meta();
    let doc = SidecarDocument::endorse(&meta, &media, chain.endorser_key(), chain.endorser_der())
        .map_err(|e| e.to_string())?;
    let empty = verify_endorsement(&doc, &media, &TrustStore::new(TrustPolicy::WarnOnExpiry));
    ensure(
        empty.status == VerificationStatus::UntrustedEndorser,
        || format!("empty store: {}", empty.status),
    )?;

    let root = DemoCa::generate(
        &SubjectName::organization("Example News"),
        ValidityWindow::days_from_now(3650),
    )
    .map_err(|e| e.to_string())?;
    let now = SystemTime::now();
    let expired_window = ValidityWindow {
        not_before: now - Duration::from_secs(400 * 86_400),
        not_after: now - Duration::from_secs(30 * 86_400),
    };
    let expired = root
        .issue(&SubjectName::organization("Example News"), expired_window)
        .map_err(|e| e.to_string())?;
    let doc = SidecarDocument::endorse(&meta, &media, &expired.key, &expired.certificate_der)
        .map_err(|e| e.to_string())?;
    let store = |policy| {
        let mut s = TrustStore::new(policy);
        s.add_root_der(root.certificate_der()).map(|_| s)
    };
    let lenient = verify_endorsement(
        &doc,
        &media,
        &store(TrustPolicy::WarnOnExpiry).map_err(|e| e.to_string())?,
    );
    ensure(
        lenient.is_verified() && !lenient.warnings.is_empty(),
        || {
            format!(
                "WarnOnExpiry: {} warnings {:?}",
                lenient.status, lenient.warnings
            )
        },
    )?;
    let strict = verify_endorsement(
        &doc,
        &media,
        &store(TrustPolicy::Strict).map_err(|e| e.to_string())?,
    );
    ensure(
        strict.status == VerificationStatus::UntrustedEndorser,
        || format!("Strict: {}", strict.status),
    )?;
    Ok(format!(
        "empty store -> UntrustedEndorser; expired endorser -> Verified with warning (\"{}\") under WarnOnExpiry, UntrustedEndorser under Strict",
        lenient.warnings[0]
    ))
}
