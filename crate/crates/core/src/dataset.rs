//! Dataset discovery: `<root>/<category>/<sequence>` directories with the
//! change-detection layout (`input/`, optional `groundtruth/`,
//! `temporalROI.txt` and `ROI` mask).

use std::path::{Path, PathBuf};

use crate::error::Result;

#[derive(Debug, Clone)]
pub struct SequenceSpec {
    pub category: String,
    pub sequence: String,
    pub input_dir: PathBuf,
    pub gt_dir: Option<PathBuf>,
    /// Inclusive frame-number window for evaluation.
    pub temporal_roi: Option<(u32, u32)>,
    pub spatial_roi: Option<PathBuf>,
}

impl SequenceSpec {
    pub fn label(&self) -> String {
        format!("{}/{}", self.category, self.sequence)
    }

    pub fn in_temporal_roi(&self, frame: u32) -> bool {
        match self.temporal_roi {
            Some((first, last)) => frame >= first && frame <= last,
            None => true,
        }
    }
}

fn sorted_dirs(path: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut dirs = Vec::new();
    for entry in std::fs::read_dir(path)? {
        let entry = entry?;
        if entry.file_type()?.is_dir() {
            dirs.push((
                entry.file_name().to_string_lossy().into_owned(),
                entry.path(),
            ));
        }
    }
    dirs.sort();
    Ok(dirs)
}

fn parse_temporal_roi(path: &Path) -> Option<(u32, u32)> {
    let text = std::fs::read_to_string(path).ok()?;
    let mut numbers = text.split_whitespace().map(|t| t.parse::<u32>());
    match (numbers.next(), numbers.next()) {
        (Some(Ok(first)), Some(Ok(last))) if first <= last => Some((first, last)),
        _ => None,
    }
}

/// Discover every sequence under `root`. A directory pair
/// `<category>/<sequence>` qualifies when it contains an `input`
/// subdirectory. A malformed `temporalROI.txt` drops the ROI with a warning
/// rather than failing the sequence.
pub fn load_dataset(root: &Path) -> Result<Vec<SequenceSpec>> {
    let mut specs = Vec::new();
    for (category, category_path) in sorted_dirs(root)? {
        for (sequence, sequence_path) in sorted_dirs(&category_path)? {
            let input_dir = sequence_path.join("input");
            if !input_dir.is_dir() {
                continue;
            }
            let gt_dir = Some(sequence_path.join("groundtruth")).filter(|p| p.is_dir());

            let roi_file = sequence_path.join("temporalROI.txt");
            let temporal_roi = if roi_file.is_file() {
                let parsed = parse_temporal_roi(&roi_file);
                if parsed.is_none() {
                    eprintln!(
                        "warning: {category}/{sequence}: malformed temporalROI.txt, ignoring it"
                    );
                }
                parsed
            } else {
                None
            };

            let spatial_roi = ["ROI.png", "ROI.bmp"]
                .iter()
                .map(|name| sequence_path.join(name))
                .find(|p| p.is_file());

            specs.push(SequenceSpec {
                category: category.clone(),
                sequence,
                input_dir,
                gt_dir,
                temporal_roi,
                spatial_roi,
            });
        }
    }
    Ok(specs)
}

/// List `<prefix><number>.<ext>` frames in a directory, sorted by number.
pub fn list_frames(dir: &Path, prefix: &str) -> Result<Vec<(u32, PathBuf)>> {
    const EXTENSIONS: [&str; 4] = ["png", "jpg", "jpeg", "pgm"];
    let mut frames = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        let Some(ext) = path.extension().and_then(|s| s.to_str()) else {
            continue;
        };
        if !EXTENSIONS.contains(&ext.to_ascii_lowercase().as_str()) {
            continue;
        }
        let Some(digits) = stem.strip_prefix(prefix) else {
            continue;
        };
        if let Ok(number) = digits.parse::<u32>() {
            frames.push((number, path));
        }
    }
    frames.sort();
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn touch(path: &Path) {
        std::fs::write(path, b"").unwrap();
    }

    #[test]
    fn empty_root_gives_empty_list() {
        let dir = tempfile::tempdir().unwrap();
        assert!(load_dataset(dir.path()).unwrap().is_empty());
    }

    #[test]
    fn discovers_sequences_with_roi_and_groundtruth() {
        let dir = tempfile::tempdir().unwrap();
        let seq = dir.path().join("baseline/highway");
        std::fs::create_dir_all(seq.join("input")).unwrap();
        std::fs::create_dir_all(seq.join("groundtruth")).unwrap();
        std::fs::write(seq.join("temporalROI.txt"), "470 1700\n").unwrap();

        let specs = load_dataset(dir.path()).unwrap();
        assert_eq!(specs.len(), 1);
        let spec = &specs[0];
        assert_eq!(spec.label(), "baseline/highway");
        assert!(spec.gt_dir.is_some());
        assert_eq!(spec.temporal_roi, Some((470, 1700)));
        assert!(spec.in_temporal_roi(470));
        assert!(!spec.in_temporal_roi(469));
    }

    #[test]
    fn sequence_without_groundtruth_or_roi() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir_all(dir.path().join("cat/seq/input")).unwrap();
        let specs = load_dataset(dir.path()).unwrap();
        assert_eq!(specs.len(), 1);
        assert!(specs[0].gt_dir.is_none());
        assert!(specs[0].temporal_roi.is_none());
        assert!(specs[0].in_temporal_roi(1));
    }

    #[test]
    fn malformed_temporal_roi_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let seq = dir.path().join("cat/seq");
        std::fs::create_dir_all(seq.join("input")).unwrap();
        std::fs::write(seq.join("temporalROI.txt"), "start end\n").unwrap();
        let specs = load_dataset(dir.path()).unwrap();
        assert_eq!(specs[0].temporal_roi, None);
    }

    #[test]
    fn directories_without_input_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir_all(dir.path().join("cat/seq/images")).unwrap();
        assert!(load_dataset(dir.path()).unwrap().is_empty());
    }

    #[test]
    fn frames_sort_numerically() {
        let dir = tempfile::tempdir().unwrap();
        for name in [
            "in000010.png",
            "in000002.jpg",
            "in000001.png",
            "gt000001.png",
            "notes.txt",
        ] {
            touch(&dir.path().join(name));
        }
        let frames = list_frames(dir.path(), "in").unwrap();
        let numbers: Vec<u32> = frames.iter().map(|f| f.0).collect();
        assert_eq!(numbers, vec![1, 2, 10]);
    }
}
