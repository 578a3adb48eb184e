//! Structure representation and the atom-addressing scheme the scorers use.
//!
//! A [`Structure`] is an immutable, canonically ordered set of labeled atoms:
//! residue index (internal, contiguous 1..N), residue type, atom name, and a
//! 3D coordinate in Ångström. Atoms are addressed by [`AtomKey`]. Residue
//! numbering from input files is remapped to 1..N at parse time; the original
//! author numbering is kept in a side map for error messages and for
//! re-indexing restraint files against the same structure.

use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("no ATOM records found")]
    EmptyStructure,
    #[error("duplicate atom {key}")]
    DuplicateAtom { key: AtomKey },
    #[error("atom {0} not present in structure")]
    MissingAtom(AtomKey),
    #[error("residue index must be >= 1")]
    BadResidueIndex,
    #[error("atom name must be non-empty")]
    EmptyAtomName,
    #[error("non-finite coordinate for atom {key}")]
    NonFiniteCoordinate { key: AtomKey },
    #[error("residue {residue_index} has no CA atom")]
    MissingCa { residue_index: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Address of one atom: 1-based residue index plus atom name (e.g. "CA", "H").
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomKey {
    pub residue_index: usize,
    pub atom_name: String,
}

impl AtomKey {
    pub fn new(residue_index: usize, atom_name: impl AsRef<str>) -> Result<Self, StructureError> {
        if residue_index < 1 {
            return Err(StructureError::BadResidueIndex);
        }
        let name = atom_name.as_ref().trim();
        if name.is_empty() {
            return Err(StructureError::EmptyAtomName);
        }
        Ok(Self {
            residue_index,
            atom_name: name.to_string(),
        })
    }
}

impl fmt::Display for AtomKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.residue_index, self.atom_name)
    }
}

/// One atom: key, 3-letter residue type, position in Å.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomRecord {
    pub key: AtomKey,
    pub residue_type: String,
    pub position: [f64; 3],
}

impl AtomRecord {
    pub fn new(
        key: AtomKey,
        residue_type: impl Into<String>,
        position: [f64; 3],
    ) -> Result<Self, StructureError> {
        if !position.iter().all(|c| c.is_finite()) {
            return Err(StructureError::NonFiniteCoordinate { key });
        }
        Ok(Self {
            key,
            residue_type: residue_type.into(),
            position,
        })
    }
}

/// An immutable labeled atom set with unique keys, sorted by
/// (residue index, atom name). Safe to share across parallel scorer
/// evaluations.
#[derive(Debug, Clone)]
pub struct Structure {
    chain_id: String,
    atoms: Vec<AtomRecord>,
    n_residues: usize,
    /// internal residue index - 1  ->  author residue number
    author_numbers: Vec<i32>,
    lookup: HashMap<AtomKey, usize>,
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        self.chain_id == other.chain_id && self.atoms == other.atoms
    }
}

impl Structure {
    /// Builds a structure from atoms, canonicalizing order and enforcing
    /// key uniqueness. The author-number side map defaults to the identity.
    pub fn new(
        chain_id: impl Into<String>,
        atoms: Vec<AtomRecord>,
    ) -> Result<Self, StructureError> {
        Self::with_author_numbers(chain_id, atoms, Vec::new())
    }

    /// As [`Structure::new`], retaining the original residue numbering.
    /// `author_numbers[i]` is the source-file number of internal residue i+1;
    /// an empty vector means internal numbering is authoritative.
    pub fn with_author_numbers(
        chain_id: impl Into<String>,
        mut atoms: Vec<AtomRecord>,
        author_numbers: Vec<i32>,
    ) -> Result<Self, StructureError> {
        if atoms.is_empty() {
            return Err(StructureError::EmptyStructure);
        }
        atoms.sort_by(|a, b| a.key.cmp(&b.key));
        let mut lookup = HashMap::with_capacity(atoms.len());
        let mut n_residues = 0;
        for (i, atom) in atoms.iter().enumerate() {
            if !atom.position.iter().all(|c| c.is_finite()) {
                return Err(StructureError::NonFiniteCoordinate {
                    key: atom.key.clone(),
                });
            }
            if lookup.insert(atom.key.clone(), i).is_some() {
                return Err(StructureError::DuplicateAtom {
                    key: atom.key.clone(),
                });
            }
            n_residues = n_residues.max(atom.key.residue_index);
        }
        if !author_numbers.is_empty() && author_numbers.len() != n_residues {
            return Err(StructureError::MalformedRecord {
                line: 0,
                reason: format!(
                    "author numbering table has {} entries for {} residues",
                    author_numbers.len(),
                    n_residues
                ),
            });
        }
        Ok(Self {
            chain_id: chain_id.into(),
            atoms,
            n_residues,
            author_numbers,
            lookup,
        })
    }

    pub fn chain_id(&self) -> &str {
        &self.chain_id
    }

    pub fn atoms(&self) -> &[AtomRecord] {
        &self.atoms
    }

    pub fn n_residues(&self) -> usize {
        self.n_residues
    }

    pub fn get(&self, key: &AtomKey) -> Option<&AtomRecord> {
        self.lookup.get(key).map(|&i| &self.atoms[i])
    }

    pub fn contains(&self, key: &AtomKey) -> bool {
        self.lookup.contains_key(key)
    }

    pub fn position(&self, key: &AtomKey) -> Result<[f64; 3], StructureError> {
        self.get(key)
            .map(|a| a.position)
            .ok_or_else(|| StructureError::MissingAtom(key.clone()))
    }

    /// Residue type of the first atom of a residue, if present.
    pub fn residue_type(&self, residue_index: usize) -> Option<&str> {
        // atoms are sorted, so partition_point finds the residue start
        let start = self
            .atoms
            .partition_point(|a| a.key.residue_index < residue_index);
        self.atoms
            .get(start)
            .filter(|a| a.key.residue_index == residue_index)
            .map(|a| a.residue_type.as_str())
    }

    /// Euclidean distance in Å; exactly symmetric in its arguments.
    pub fn distance(&self, a: &AtomKey, b: &AtomKey) -> Result<f64, StructureError> {
        let pa = self.position(a)?;
        let pb = self.position(b)?;
        Ok(point_distance(pa, pb))
    }

    /// Author residue number of an internal index (1-based).
    pub fn author_number(&self, residue_index: usize) -> Option<i32> {
        if residue_index < 1 || residue_index > self.n_residues {
            return None;
        }
        if self.author_numbers.is_empty() {
            Some(residue_index as i32)
        } else {
            self.author_numbers.get(residue_index - 1).copied()
        }
    }

    /// Inverse of the author-number side map.
    pub fn internal_for_author(&self, author: i32) -> Option<usize> {
        if self.author_numbers.is_empty() {
            let idx = usize::try_from(author).ok()?;
            return (1..=self.n_residues).contains(&idx).then_some(idx);
        }
        self.author_numbers
            .iter()
            .position(|&n| n == author)
            .map(|i| i + 1)
    }

    /// One CA position per residue, in residue order. Errors on the first
    /// residue lacking a CA atom.
    pub fn ca_trace(&self) -> Result<Vec<[f64; 3]>, StructureError> {
        (1..=self.n_residues)
            .map(|i| {
                let key = AtomKey {
                    residue_index: i,
                    atom_name: "CA".to_string(),
                };
                self.get(&key)
                    .map(|a| a.position)
                    .ok_or(StructureError::MissingCa { residue_index: i })
            })
            .collect()
    }

    /// Builds a CA-only structure from one position per residue.
    pub fn from_ca_trace(
        chain_id: impl Into<String>,
        residue_type: &str,
        positions: &[[f64; 3]],
    ) -> Result<Self, StructureError> {
        let atoms = positions
            .iter()
            .enumerate()
            .map(|(i, &p)| AtomRecord::new(AtomKey::new(i + 1, "CA")?, residue_type, p))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(chain_id, atoms)
    }
}

pub fn point_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}
