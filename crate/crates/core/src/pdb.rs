//! Fixed-column PDB ATOM subset: parser and writer.
//!
//! Only ATOM records of the first model and first chain are read. Altloc
//! characters other than blank or 'A' are skipped, HETATM and insertion
//! codes are ignored, and residues are renumbered to contiguous 1..N in
//! order of first appearance (the author numbering is kept as a side map).

use crate::structure::{AtomKey, AtomRecord, Structure, StructureError};
use std::path::Path;

/// Parses the ATOM records of a PDB text into a canonical [`Structure`].
pub fn parse_pdb(text: &str) -> Result<Structure, StructureError> {
    let mut atoms: Vec<AtomRecord> = Vec::new();
    let mut author_order: Vec<i32> = Vec::new();
    let mut chain: Option<char> = None;
    let mut saw_model_atoms = false;

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        if line.starts_with("ENDMDL") && saw_model_atoms {
            break;
        }
        if !line.starts_with("ATOM") {
            continue;
        }
        let rec = parse_atom_line(line, lineno)?;
        if !matches!(rec.alt_loc, ' ' | 'A') {
            continue;
        }
        match chain {
            None => chain = Some(rec.chain_id),
            Some(c) if c != rec.chain_id => continue,
            _ => {}
        }
        saw_model_atoms = true;
        let internal = match author_order.iter().position(|&n| n == rec.res_seq) {
            Some(i) => i + 1,
            None => {
                author_order.push(rec.res_seq);
                author_order.len()
            }
        };
        let key = AtomKey::new(internal, &rec.name).map_err(|e| {
            StructureError::MalformedRecord {
                line: lineno,
                reason: e.to_string(),
            }
        })?;
        if atoms.iter().any(|a| a.key == key) {
            return Err(StructureError::MalformedRecord {
                line: lineno,
                reason: format!("duplicate atom {key}"),
            });
        }
        atoms.push(AtomRecord::new(key, rec.res_name, rec.position).map_err(|e| {
            StructureError::MalformedRecord {
                line: lineno,
                reason: e.to_string(),
            }
        })?);
    }

    if atoms.is_empty() {
        return Err(StructureError::EmptyStructure);
    }
    let chain_id = chain.unwrap_or('A').to_string();
    Structure::with_author_numbers(chain_id, atoms, author_order)
}

pub fn read_pdb_file(path: &Path) -> Result<Structure, StructureError> {
    let text = std::fs::read_to_string(path).map_err(|source| StructureError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_pdb(&text)
}

struct RawAtom {
    name: String,
    alt_loc: char,
    res_name: String,
    chain_id: char,
    res_seq: i32,
    position: [f64; 3],
}

fn col(line: &str, start: usize, end: usize) -> &str {
    // 1-based inclusive column range, tolerant of short lines
    let bytes = line.as_bytes();
    let lo = (start - 1).min(bytes.len());
    let hi = end.min(bytes.len());
    std::str::from_utf8(&bytes[lo..hi]).unwrap_or("")
}

fn parse_atom_line(line: &str, lineno: usize) -> Result<RawAtom, StructureError> {
    let malformed = |reason: String| StructureError::MalformedRecord {
        line: lineno,
        reason,
    };
    if line.len() < 54 {
        return Err(malformed(format!(
            "ATOM record too short ({} columns, need 54)",
            line.len()
        )));
    }
    let name = normalize_atom_name(col(line, 13, 16).trim());
    let alt_loc = col(line, 17, 17).chars().next().unwrap_or(' ');
    let res_name = col(line, 18, 20).trim().to_string();
    let chain_id = col(line, 22, 22).chars().next().unwrap_or(' ');
    let res_seq: i32 = col(line, 23, 26)
        .trim()
        .parse()
        .map_err(|_| malformed(format!("bad residue number {:?}", col(line, 23, 26).trim())))?;
    let mut position = [0.0; 3];
    for (i, (lo, hi)) in [(31, 38), (39, 46), (47, 54)].iter().enumerate() {
        position[i] = col(line, *lo, *hi)
            .trim()
            .parse()
            .map_err(|_| malformed(format!("bad coordinate {:?}", col(line, *lo, *hi).trim())))?;
    }
    Ok(RawAtom {
        name,
        alt_loc,
        res_name,
        chain_id,
        res_seq,
        position,
    })
}

/// Legacy names put the digit first ("1HB2" style); rotate it to the end.
fn normalize_atom_name(name: &str) -> String {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_digit() && name.len() > 1 => {
            let mut out: String = chars.collect();
            out.push(c);
            out
        }
        _ => name.to_string(),
    }
}

/// Serializes a structure as fixed-column ATOM records (3-decimal
/// coordinates), indexed by the author numbering when one is known.
pub fn write_pdb(s: &Structure) -> String {
    let chain = s.chain_id().chars().next().unwrap_or('A');
    let mut out = String::new();
    for (serial, atom) in s.atoms().iter().enumerate() {
        let res_seq = s
            .author_number(atom.key.residue_index)
            .unwrap_or(atom.key.residue_index as i32);
        let name = format_atom_name(&atom.key.atom_name);
        let element = atom
            .key
            .atom_name
            .chars()
            .find(|c| c.is_ascii_alphabetic())
            .unwrap_or(' ');
        out.push_str(&format!(
            "ATOM  {:>5} {}{}{:>3} {}{:>4}    {:8.3}{:8.3}{:8.3}{:6.2}{:6.2}          {:>2}\n",
            serial + 1,
            name,
            ' ',
            truncate(&atom.residue_type, 3),
            chain,
            res_seq,
            atom.position[0],
            atom.position[1],
            atom.position[2],
            1.00,
            0.00,
            element,
        ));
    }
    out.push_str("TER\nEND\n");
    out
}

pub fn write_pdb_file(s: &Structure, path: &Path) -> Result<(), StructureError> {
    std::fs::write(path, write_pdb(s)).map_err(|source| StructureError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn format_atom_name(name: &str) -> String {
    // wwPDB convention: names shorter than 4 characters start in column 14
    if name.len() >= 4 {
        truncate(name, 4).to_string()
    } else {
        format!(" {name:<3}")
    }
}

fn truncate(s: &str, n: usize) -> &str {
    &s[..s.len().min(n)]
}
