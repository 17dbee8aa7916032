//! Atomic file output and the PGM image writer.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Writes `name` inside `dir` through a temporary file and a rename.
pub fn write_atomic<F>(dir: &Path, name: &str, body: F) -> Result<PathBuf, CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
{
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let file = File::create(&tmp).map_err(|e| CliError::Io(format!("{}: {e}", tmp.display())))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        w.flush()?;
        w.get_ref().sync_all()?;
        Ok(())
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(e);
    }
    fs::rename(&tmp, &target).map_err(|e| CliError::Io(format!("{}: {e}", target.display())))?;
    Ok(target)
}

/// Binary greyscale PGM (P5) with `#` comment lines in the header.
pub fn write_pgm<W: Write>(
    out: &mut W,
    width: usize,
    height: usize,
    pixels: &[u8],
    comments: &[(String, String)],
) -> Result<(), CliError> {
    assert_eq!(pixels.len(), width * height);
    writeln!(out, "P5")?;
    for (k, v) in comments {
        writeln!(out, "# {k}: {v}")?;
    }
    write!(out, "{width} {height}\n255\n")?;
    out.write_all(pixels)?;
    Ok(())
}

/// Log-scaled greyscale of hit counts; empty pixels stay black.
pub fn shade(counts: &[u32]) -> Vec<u8> {
    let max = counts.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return vec![0; counts.len()];
    }
    let scale = (1.0 + max as f64).ln();
    counts
        .iter()
        .map(|&c| {
            if c == 0 {
                0
            } else {
                (64.0 + 191.0 * (1.0 + c as f64).ln() / scale).round() as u8
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_header() {
        let mut buf = Vec::new();
        write_pgm(&mut buf, 2, 1, &[0, 255], &[("k".into(), "v".into())]).unwrap();
        assert_eq!(buf, b"P5\n# k: v\n2 1\n255\n\x00\xff");
    }

    #[test]
    fn shading_is_monotone() {
        let s = shade(&[0, 1, 5, 100]);
        assert_eq!(s[0], 0);
        assert!(s[1] < s[2] && s[2] < s[3]);
        assert_eq!(s[3], 255);
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_atomic(dir.path(), "a.txt", |w| {
            w.write_all(b"hi")?;
            Ok(())
        })
        .unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"hi");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
        let r = write_atomic(dir.path(), "b.txt", |_| Err(CliError::Analysis("stop".into())));
        assert!(r.is_err());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
