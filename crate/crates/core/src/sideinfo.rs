//! Has/Wants side information and the instant-decodability predicate for
//! XOR file combinations.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{check_index, Error, Result};

pub type FileSet = BTreeSet<usize>;

/// Per-user Has and Wants sets over files `0..num_files`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideInformation {
    num_files: usize,
    has: Vec<FileSet>,
    wants: Vec<FileSet>,
}

impl SideInformation {
    pub fn new(num_files: usize, has: Vec<FileSet>, wants: Vec<FileSet>) -> Result<Self> {
        if has.len() != wants.len() {
            return Err(Error::MissingData(format!(
                "has sets for {} users but wants sets for {}",
                has.len(),
                wants.len()
            )));
        }
        for (u, (h, w)) in has.iter().zip(&wants).enumerate() {
            if let Some(&f) = h.iter().chain(w.iter()).find(|&&f| f >= num_files) {
                return Err(Error::IndexOutOfRange {
                    what: "file",
                    index: f,
                    limit: num_files,
                });
            }
            if let Some(f) = h.intersection(w).next() {
                return Err(Error::Domain(format!("user {u} both has and wants file {f}")));
            }
        }
        Ok(Self { num_files, has, wants })
    }

    /// Convenience constructor from slices, e.g. `&[&[1], &[0]]`.
    pub fn from_lists(num_files: usize, has: &[&[usize]], wants: &[&[usize]]) -> Result<Self> {
        let conv = |l: &[&[usize]]| l.iter().map(|s| s.iter().copied().collect()).collect();
        Self::new(num_files, conv(has), conv(wants))
    }

    pub fn num_users(&self) -> usize {
        self.has.len()
    }

    pub fn num_files(&self) -> usize {
        self.num_files
    }

    pub fn has(&self, u: usize) -> &FileSet {
        &self.has[u]
    }

    pub fn wants(&self, u: usize) -> &FileSet {
        &self.wants[u]
    }

    pub fn user_has(&self, u: usize, f: usize) -> bool {
        self.has[u].contains(&f)
    }

    pub fn user_wants(&self, u: usize, f: usize) -> bool {
        self.wants[u].contains(&f)
    }

    pub fn check_user(&self, u: usize) -> Result<()> {
        check_index("user", u, self.has.len())
    }
}

/// A nonempty XOR combination of source files.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EncodedFile(FileSet);

impl EncodedFile {
    pub fn new(files: FileSet) -> Result<Self> {
        if files.is_empty() {
            return Err(Error::Domain("encoded file must combine at least one file".into()));
        }
        Ok(Self(files))
    }

    pub fn single(f: usize) -> Self {
        Self(FileSet::from([f]))
    }

    pub fn files(&self) -> &FileSet {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<const N: usize> From<[usize; N]> for EncodedFile {
    /// Panics on an empty array.
    fn from(files: [usize; N]) -> Self {
        Self::new(files.into_iter().collect()).expect("nonempty combination")
    }
}

impl fmt::Display for EncodedFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for file in &self.0 {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{file}")?;
            first = false;
        }
        Ok(())
    }
}

/// True iff `k` holds exactly one file user `u` wants and every other file in
/// `k` is already in the user's Has set.
pub fn is_instantly_decodable(k: &EncodedFile, u: usize, si: &SideInformation) -> Result<bool> {
    si.check_user(u)?;
    let mut wanted = 0usize;
    for f in k.files() {
        if si.user_wants(u, *f) {
            wanted += 1;
            if wanted > 1 {
                return Ok(false);
            }
        } else if !si.user_has(u, *f) {
            return Ok(false);
        }
    }
    Ok(wanted == 1)
}

/// The file user `u` recovers from `k`.
pub fn decoded_file(k: &EncodedFile, u: usize, si: &SideInformation) -> Result<usize> {
    if !is_instantly_decodable(k, u, si)? {
        return Err(Error::ContractViolation(format!(
            "combination {{{k}}} is not instantly decodable for user {u}"
        )));
    }
    Ok(*k
        .files()
        .iter()
        .find(|f| si.user_wants(u, **f))
        .expect("decodable combination holds one wanted file"))
}
