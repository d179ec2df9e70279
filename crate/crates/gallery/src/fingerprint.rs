use mfdm_measures::{AtomicMeasure, MeasureTree};

const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const PRIME: u64 = 0x0000_0100_0000_01b3;

struct Fnv(u64);

impl Fnv {
    fn word(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(PRIME);
        }
    }
}

/// FNV-1a over the atom coordinates (or words) and masses, bit for bit.
pub fn fingerprint_atomic(m: &AtomicMeasure) -> u64 {
    let mut h = Fnv(OFFSET);
    h.word(m.len() as u64);
    for i in 0..m.len() {
        if let Some(c) = m.space().coords(i) {
            c.iter().for_each(|x| h.word(x.to_bits()));
        } else if let Some(w) = m.space().word(i) {
            w.iter().for_each(|&s| h.word(s as u64));
        }
        h.word(m.mass(i).to_bits());
    }
    h.0
}

/// FNV-1a over every cell's interval, mass and parent.
pub fn fingerprint_tree(t: &MeasureTree) -> u64 {
    let mut h = Fnv(OFFSET);
    h.word(t.len() as u64);
    for c in t.cells() {
        h.word(c.lo.to_bits());
        h.word(c.hi.to_bits());
        h.word(c.mass.to_bits());
        h.word(c.parent.map_or(u64::MAX, |p| p as u64));
    }
    h.0
}
