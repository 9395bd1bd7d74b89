//! Sequence manifests, frame loading, and subject-aware splits.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{MorfError, Result};
use crate::frame::GrayFrame;
use crate::io::load_gray_frame;

/// One annotated image sequence. `f_apex` may be omitted in the JSON when
/// `f_offset` is present; it then defaults to the onset/offset midpoint.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceAnnotation {
    pub id: String,
    pub subject_id: String,
    pub label: String,
    pub frames_dir: PathBuf,
    pub f_onset: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_offset: Option<usize>,
    #[serde(default = "default_apex")]
    pub f_apex: usize,
    pub fps: f64,
}

const APEX_UNSET: usize = usize::MAX;

fn default_apex() -> usize {
    APEX_UNSET
}

impl SequenceAnnotation {
    /// Fills a missing apex with the onset/offset midpoint and checks the
    /// ordering invariants.
    pub fn normalize(&mut self) -> Result<()> {
        if self.f_apex == APEX_UNSET {
            let offset = self.f_offset.ok_or_else(|| MorfError::Validation {
                id: self.id.clone(),
                reason: "sequence has neither f_apex nor f_offset".into(),
            })?;
            self.f_apex = (self.f_onset + offset) / 2;
        }
        if self.f_onset > self.f_apex {
            return Err(MorfError::Validation {
                id: self.id.clone(),
                reason: format!("f_onset {} > f_apex {}", self.f_onset, self.f_apex),
            });
        }
        if let Some(off) = self.f_offset {
            if self.f_apex > off {
                return Err(MorfError::Validation {
                    id: self.id.clone(),
                    reason: format!("f_apex {} > f_offset {}", self.f_apex, off),
                });
            }
        }
        if !(self.fps > 0.0) {
            return Err(MorfError::Validation {
                id: self.id.clone(),
                reason: format!("fps must be positive, got {}", self.fps),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub classes: Vec<String>,
    pub sequences: Vec<SequenceAnnotation>,
}

impl DatasetManifest {
    pub fn validate(&self) -> Result<()> {
        if self.sequences.is_empty() {
            return Err(MorfError::Parse("manifest has no sequences".into()));
        }
        if self.classes.is_empty() {
            return Err(MorfError::Parse("manifest has no classes".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for seq in &self.sequences {
            if !seen.insert(seq.id.clone()) {
                return Err(MorfError::Validation {
                    id: seq.id.clone(),
                    reason: "duplicate sequence id".into(),
                });
            }
            if !self.classes.contains(&seq.label) {
                return Err(MorfError::Validation {
                    id: seq.id.clone(),
                    reason: format!("label '{}' not in class list", seq.label),
                });
            }
        }
        Ok(())
    }

    pub fn subjects(&self) -> Vec<String> {
        let mut set: Vec<String> = self
            .sequences
            .iter()
            .map(|s| s.subject_id.clone())
            .collect();
        set.sort();
        set.dedup();
        set
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == label)
    }
}

/// Loads and validates a manifest. Relative frame directories are resolved
/// against the manifest file's parent directory.
pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| MorfError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let mut manifest: DatasetManifest = serde_json::from_str(&text)
        .map_err(|e| MorfError::Parse(format!("invalid manifest JSON: {e}")))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    for seq in &mut manifest.sequences {
        seq.normalize()?;
        if seq.frames_dir.is_relative() {
            seq.frames_dir = base.join(&seq.frames_dir);
        }
    }
    manifest.validate()?;
    Ok(manifest)
}

pub fn save_manifest(manifest: &DatasetManifest, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|e| MorfError::Parse(format!("manifest serialization: {e}")))?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Saves with frame directories relativized against the manifest location,
/// producing a tree that is portable (and byte-stable across machines).
pub fn save_manifest_relative(manifest: &DatasetManifest, path: &Path) -> Result<()> {
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut rel = manifest.clone();
    for seq in &mut rel.sequences {
        if let Ok(stripped) = seq.frames_dir.strip_prefix(base) {
            seq.frames_dir = stripped.to_path_buf();
        }
    }
    save_manifest(&rel, path)
}

/// Loads the lexicographically ordered frames of one sequence, checking
/// uniform dimensions and that the apex frame exists.
pub fn load_sequence(ann: &SequenceAnnotation) -> Result<Vec<GrayFrame>> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(&ann.frames_dir)
        .map_err(|e| MorfError::Sequence(format!(
            "sequence '{}': cannot read frames dir {}: {e}",
            ann.id,
            ann.frames_dir.display()
        )))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()).map(|s| s.to_ascii_lowercase()),
                Some(ref ext) if ["png", "pgm", "ppm", "pnm"].contains(&ext.as_str())
            )
        })
        .collect();
    entries.sort();
    if entries.len() <= ann.f_apex {
        return Err(MorfError::Annotation(format!(
            "sequence '{}': apex frame {} beyond frame count {}",
            ann.id,
            ann.f_apex,
            entries.len()
        )));
    }
    let mut frames = Vec::with_capacity(entries.len());
    let mut dims = None;
    for path in &entries {
        let frame = load_gray_frame(path)?;
        match dims {
            None => dims = Some(frame.dims()),
            Some(d) if d != frame.dims() => {
                return Err(MorfError::Sequence(format!(
                    "sequence '{}': mixed frame dimensions ({}x{} vs {}x{})",
                    ann.id,
                    d.0,
                    d.1,
                    frame.width(),
                    frame.height()
                )))
            }
            _ => {}
        }
        frames.push(frame);
    }
    Ok(frames)
}

/// One fold per subject, ordered by subject id: fold k tests exactly the
/// sequences of subject k and trains on everything else.
pub fn loso_splits(manifest: &DatasetManifest) -> Result<Vec<(Vec<String>, Vec<String>)>> {
    let mut by_subject: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for seq in &manifest.sequences {
        by_subject.entry(&seq.subject_id).or_default().push(&seq.id);
    }
    if by_subject.len() < 2 {
        return Err(MorfError::Split(format!(
            "LOSO needs at least 2 subjects, manifest has {}",
            by_subject.len()
        )));
    }
    let mut folds = Vec::with_capacity(by_subject.len());
    for subject in by_subject.keys() {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for seq in &manifest.sequences {
            if seq.subject_id == *subject {
                test.push(seq.id.clone());
            } else {
                train.push(seq.id.clone());
            }
        }
        folds.push((train, test));
    }
    Ok(folds)
}
