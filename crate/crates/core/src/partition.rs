//! Building sets of MT statuses for parallel streams.
//!
//! Three ways of handing one status to each processing element are
//! supported: sequence splitting (statuses saved at a fixed draw spacing
//! along one long stream), random spacing (status arrays filled with the
//! output of a master generator) and the indexed sequence (one
//! `init_genrand` seed per element). Every set carries enough provenance to
//! be regenerated bit for bit, and serializes to a plain-text form that can
//! be compared across machines byte by byte.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::mt::{MtState, STATE_WORDS};

pub const STATUS_HEADER: &str = "MT19937-STATUS v1";
pub const MANIFEST_HEADER: &str = "# MT19937-MANIFEST v1";
pub const MANIFEST_NAME: &str = "MANIFEST";
pub const STATUS_EXT: &str = "mts";

/// Spacing used for sequence splitting when none is given.
pub const DEFAULT_SPACING: u64 = 1_000_000;

/// Declared in name order so sorting by technique matches sorting by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Technique {
    #[serde(rename = "indexed")]
    IndexedSequence,
    #[serde(rename = "random")]
    RandomSpacing,
    #[serde(rename = "split")]
    SequenceSplitting,
}

impl Technique {
    pub const ALL: [Technique; 3] = [
        Technique::SequenceSplitting,
        Technique::RandomSpacing,
        Technique::IndexedSequence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Technique::SequenceSplitting => "split",
            Technique::RandomSpacing => "random",
            Technique::IndexedSequence => "indexed",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Technique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "split" => Ok(Technique::SequenceSplitting),
            "random" => Ok(Technique::RandomSpacing),
            "indexed" => Ok(Technique::IndexedSequence),
            other => Err(Error::Params(format!("unknown technique `{other}`"))),
        }
    }
}

/// Generation parameters; a set is a pure function of these.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    SequenceSplitting {
        base_seed: u32,
        spacing: u64,
        count: usize,
    },
    RandomSpacing {
        master_seed: u32,
        count: usize,
        /// All-zero candidates thrown away while filling the set.
        discarded: usize,
    },
    IndexedSequence {
        start: u32,
        count: usize,
    },
}

impl Provenance {
    pub fn technique(&self) -> Technique {
        match self {
            Provenance::SequenceSplitting { .. } => Technique::SequenceSplitting,
            Provenance::RandomSpacing { .. } => Technique::RandomSpacing,
            Provenance::IndexedSequence { .. } => Technique::IndexedSequence,
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::SequenceSplitting {
                base_seed,
                spacing,
                count,
            } => write!(f, "base_seed={base_seed} spacing={spacing} count={count}"),
            Provenance::RandomSpacing {
                master_seed,
                count,
                discarded,
            } => write!(
                f,
                "master_seed={master_seed} count={count} discarded={discarded}"
            ),
            Provenance::IndexedSequence { start, count } => {
                write!(f, "start={start} count={count}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatusSet {
    pub provenance: Provenance,
    /// Position `i` holds the status with index `i`.
    pub statuses: Vec<MtState>,
}

impl StatusSet {
    pub fn technique(&self) -> Technique {
        self.provenance.technique()
    }

    pub fn len(&self) -> usize {
        self.statuses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statuses.is_empty()
    }
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::Params("count must be positive".into()));
    }
    Ok(())
}

/// Statuses saved every `spacing` draws along the stream seeded by
/// `base_seed`. With `strict`, a zero spacing (all statuses equal) is an
/// error.
pub fn generate_sequence_splitting(
    base_seed: u32,
    spacing: u64,
    count: usize,
    strict: bool,
) -> Result<StatusSet> {
    check_count(count)?;
    if strict && spacing == 0 {
        return Err(Error::Params(
            "spacing 0 makes every status identical".into(),
        ));
    }
    spacing
        .checked_mul(count as u64 - 1)
        .ok_or_else(|| Error::Params("spacing x count overflows the draw counter".into()))?;

    let mut cursor = MtState::init_genrand(base_seed);
    let mut statuses = Vec::with_capacity(count);
    for i in 0..count {
        if i > 0 {
            cursor.advance(spacing);
        }
        statuses.push(cursor.clone());
    }
    Ok(StatusSet {
        provenance: Provenance::SequenceSplitting {
            base_seed,
            spacing,
            count,
        },
        statuses,
    })
}

/// Statuses whose arrays are filled, 624 words at a time, by a master
/// generator seeded with `master_seed`. Each status starts with `mti = 624`.
pub fn generate_random_spacing(master_seed: u32, count: usize) -> Result<StatusSet> {
    check_count(count)?;
    let mut master = MtState::init_genrand(master_seed);
    let mut statuses = Vec::with_capacity(count);
    let mut discarded = 0;
    while statuses.len() < count {
        let mut words = [0u32; STATE_WORDS];
        for w in words.iter_mut() {
            *w = master.next_u32();
        }
        match MtState::from_parts(words, STATE_WORDS) {
            Ok(s) => statuses.push(s),
            Err(Error::ZeroState) => discarded += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(StatusSet {
        provenance: Provenance::RandomSpacing {
            master_seed,
            count,
            discarded,
        },
        statuses,
    })
}

/// Status `i` is `init_genrand(start + i)`.
pub fn generate_indexed(start: u32, count: usize) -> Result<StatusSet> {
    check_count(count)?;
    let last = start as u64 + count as u64 - 1;
    if last > u32::MAX as u64 {
        return Err(Error::Params(format!(
            "seed range {start}..={last} exceeds the 32-bit seed space"
        )));
    }
    let statuses = (0..count as u32)
        .into_par_iter()
        .map(|i| MtState::init_genrand(start + i))
        .collect();
    Ok(StatusSet {
        provenance: Provenance::IndexedSequence { start, count },
        statuses,
    })
}

/// Regenerates a set from its provenance.
pub fn regenerate(provenance: &Provenance) -> Result<StatusSet> {
    match *provenance {
        Provenance::SequenceSplitting {
            base_seed,
            spacing,
            count,
        } => generate_sequence_splitting(base_seed, spacing, count, false),
        Provenance::RandomSpacing {
            master_seed, count, ..
        } => generate_random_spacing(master_seed, count),
        Provenance::IndexedSequence { start, count } => generate_indexed(start, count),
    }
}

/// Serializes a status in the bit-exact ASCII status format.
pub fn serialize_status(state: &MtState) -> String {
    use fmt::Write;
    let mut out = String::with_capacity(STATE_WORDS * 11 + 32);
    out.push_str(STATUS_HEADER);
    out.push('\n');
    for w in state.words() {
        writeln!(out, "{w}").unwrap();
    }
    writeln!(out, "{}", state.index()).unwrap();
    out
}

fn parse_decimal(token: &str, line: usize) -> Result<u64> {
    let canonical = !token.is_empty()
        && token.bytes().all(|b| b.is_ascii_digit())
        && (token == "0" || !token.starts_with('0'));
    if !canonical || token.len() > 10 {
        return Err(Error::Format(format!(
            "line {line}: `{token}` is not a canonical 32-bit decimal"
        )));
    }
    let v: u64 = token.parse().expect("digits checked");
    if v > u32::MAX as u64 {
        return Err(Error::Format(format!("line {line}: {v} exceeds 2^32-1")));
    }
    Ok(v)
}

/// Parses the status format. Only byte sequences that `serialize_status`
/// could have produced are accepted.
pub fn parse_status(text: &str) -> Result<MtState> {
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| Error::Format("missing final newline".into()))?;
    let lines: Vec<&str> = body.split('\n').collect();
    if lines[0] != STATUS_HEADER {
        return Err(Error::Format(format!(
            "expected header `{STATUS_HEADER}`, found `{}`",
            lines[0]
        )));
    }
    if lines.len() != STATE_WORDS + 2 {
        return Err(Error::Format(format!(
            "expected {} lines, found {}",
            STATE_WORDS + 2,
            lines.len()
        )));
    }
    let mut words = [0u32; STATE_WORDS];
    for (i, w) in words.iter_mut().enumerate() {
        *w = parse_decimal(lines[i + 1], i + 2)? as u32;
    }
    let mti = parse_decimal(lines[STATE_WORDS + 1], STATE_WORDS + 2)? as usize;
    MtState::from_parts(words, mti).map_err(|e| Error::Format(e.to_string()))
}

pub fn status_file_name(technique: Technique, index: usize) -> String {
    format!("{technique}_{index:05}.{STATUS_EXT}")
}

/// Splits `<technique>_<index>.mts` into its parts.
pub fn parse_status_file_name(name: &str) -> Option<(Technique, usize)> {
    let stem = name.strip_suffix(".mts")?;
    let (tech, idx) = stem.rsplit_once('_')?;
    if idx.is_empty() || !idx.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((tech.parse().ok()?, idx.parse().ok()?))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// One manifest line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub file_name: String,
    pub sha256: String,
    pub technique: Technique,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub technique: Technique,
    pub provenance: String,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn render(&self) -> String {
        let mut out = format!(
            "{MANIFEST_HEADER}\n# technique: {}\n# provenance: {}\n",
            self.technique, self.provenance
        );
        for e in &self.entries {
            out.push_str(&format!(
                "{} {} {} {}\n",
                e.file_name, e.sha256, e.technique, e.index
            ));
        }
        out
    }

    /// SHA-256 of the rendered manifest; identifies the whole set.
    pub fn fingerprint(&self) -> String {
        sha256_hex(self.render().as_bytes())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some(MANIFEST_HEADER) {
            return Err(Error::Format("manifest header missing".into()));
        }
        let technique = lines
            .next()
            .and_then(|l| l.strip_prefix("# technique: "))
            .ok_or_else(|| Error::Format("manifest technique line missing".into()))?
            .parse()?;
        let provenance = lines
            .next()
            .and_then(|l| l.strip_prefix("# provenance: "))
            .ok_or_else(|| Error::Format("manifest provenance line missing".into()))?
            .to_string();
        let mut entries = Vec::new();
        for line in lines {
            let parts: Vec<&str> = line.split(' ').collect();
            let [file_name, sha, tech, index] = parts[..] else {
                return Err(Error::Format(format!("bad manifest line `{line}`")));
            };
            entries.push(ManifestEntry {
                file_name: file_name.to_string(),
                sha256: sha.to_string(),
                technique: tech.parse()?,
                index: index
                    .parse()
                    .map_err(|_| Error::Format(format!("bad index in `{line}`")))?,
            });
        }
        Ok(Self {
            technique,
            provenance,
            entries,
        })
    }
}

/// Writes every status plus a `MANIFEST` into `dir` (created if needed).
pub fn write_set(set: &StatusSet, dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let technique = set.technique();
    let entries = set
        .statuses
        .par_iter()
        .enumerate()
        .map(|(index, state)| {
            let file_name = status_file_name(technique, index);
            let text = serialize_status(state);
            let path = dir.join(&file_name);
            fs::write(&path, text.as_bytes()).map_err(|e| Error::io(&path, e))?;
            Ok(ManifestEntry {
                file_name,
                sha256: sha256_hex(text.as_bytes()),
                technique,
                index,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        technique,
        provenance: set.provenance.to_string(),
        entries,
    };
    let path = dir.join(MANIFEST_NAME);
    fs::write(&path, manifest.render()).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// A status loaded from disk, with the checksum of its file bytes.
#[derive(Debug, Clone)]
pub struct LoadedStatus {
    pub technique: Technique,
    pub index: usize,
    pub path: PathBuf,
    pub sha256: String,
    pub state: MtState,
}

pub fn load_status_file(path: &Path) -> Result<LoadedStatus> {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or_default();
    let (technique, index) = parse_status_file_name(name).ok_or_else(|| {
        Error::Format(format!(
            "{}: file name is not `<technique>_<index>.mts`",
            path.display()
        ))
    })?;
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| Error::Format(format!("{}: not ASCII", path.display())))?;
    let state =
        parse_status(text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    Ok(LoadedStatus {
        technique,
        index,
        path: path.to_path_buf(),
        sha256: sha256_hex(&bytes),
        state,
    })
}

/// Lists the status files of a directory, sorted by (technique, index).
pub fn list_status_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        if let Some(key) = name.to_str().and_then(parse_status_file_name) {
            found.push((key, entry.path()));
        }
    }
    found.sort();
    Ok(found.into_iter().map(|(_, p)| p).collect())
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub identical: Vec<PathBuf>,
    pub differing: Vec<PathBuf>,
    pub only_in_a: Vec<PathBuf>,
    pub only_in_b: Vec<PathBuf>,
}

impl VerifyReport {
    pub fn is_identical(&self) -> bool {
        self.differing.is_empty() && self.only_in_a.is_empty() && self.only_in_b.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.differing {
            writeln!(f, "differ: {}", p.display())?;
        }
        for p in &self.only_in_a {
            writeln!(f, "only in A: {}", p.display())?;
        }
        for p in &self.only_in_b {
            writeln!(f, "only in B: {}", p.display())?;
        }
        write!(
            f,
            "{} identical, {} differing, {} only in A, {} only in B",
            self.identical.len(),
            self.differing.len(),
            self.only_in_a.len(),
            self.only_in_b.len()
        )
    }
}

fn collect_files(root: &Path, rel: &Path, out: &mut BTreeSet<PathBuf>) -> Result<()> {
    let dir = root.join(rel);
    for entry in fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
        let entry = entry.map_err(|e| Error::io(&dir, e))?;
        let rel_path = rel.join(entry.file_name());
        let kind = entry.file_type().map_err(|e| Error::io(entry.path(), e))?;
        if kind.is_dir() {
            collect_files(root, &rel_path, out)?;
        } else {
            out.insert(rel_path);
        }
    }
    Ok(())
}

/// Recursive byte-for-byte comparison of two directory trees.
pub fn verify_sets(dir_a: &Path, dir_b: &Path) -> Result<VerifyReport> {
    let mut a = BTreeSet::new();
    let mut b = BTreeSet::new();
    collect_files(dir_a, Path::new(""), &mut a)?;
    collect_files(dir_b, Path::new(""), &mut b)?;
    let mut report = VerifyReport::default();
    for rel in a.union(&b) {
        match (a.contains(rel), b.contains(rel)) {
            (true, true) => {
                let pa = dir_a.join(rel);
                let pb = dir_b.join(rel);
                let ba = fs::read(&pa).map_err(|e| Error::io(&pa, e))?;
                let bb = fs::read(&pb).map_err(|e| Error::io(&pb, e))?;
                if ba == bb {
                    report.identical.push(rel.clone());
                } else {
                    report.differing.push(rel.clone());
                }
            }
            (true, false) => report.only_in_a.push(rel.clone()),
            _ => report.only_in_b.push(rel.clone()),
        }
    }
    Ok(report)
}

/// Birthday-style probability that any two of `streams` substreams of
/// `length` draws, started at random points of a cycle of length
/// `2^period_log2`, overlap: `1 - exp(-k(k-1)L / 2^p)`.
///
/// Accurate in the regime `k * L << 2^p`. The exponent is formed in log2
/// space so huge periods underflow cleanly to 0.
pub fn overlap_probability(period_log2: u32, streams: u64, length: u64) -> f64 {
    if streams < 2 || length == 0 {
        return 0.0;
    }
    let k = streams as f64;
    let log2_mean = k.log2() + (k - 1.0).log2() + (length as f64).log2() - period_log2 as f64;
    if log2_mean > 64.0 {
        return 1.0;
    }
    let mean = log2_mean.exp2();
    (-(-mean).exp_m1()).clamp(0.0, 1.0)
}
