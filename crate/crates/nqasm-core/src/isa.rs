//! Instruction set definitions: opcodes, operand kinds, signatures and flavors.
//!
//! The core instruction set (ids `0x00..=0x2F`) is always available. Quantum
//! gates live in *flavors*: the platform-independent vanilla flavor
//! (`0x30..=0x5F`) and the NV flavor (`0x60..=0x7F`). Mnemonics may overlap
//! between flavors (`init`, `rot_x`, ...), but every opcode id is unique.

use std::fmt;

use thiserror::Error;

/// Errors raised by ISA lookups and angle arithmetic.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum IsaError {
    #[error("unknown opcode id 0x{0:02x}")]
    UnknownOpcode(u8),
    #[error("unknown mnemonic `{0}`")]
    UnknownMnemonic(String),
    #[error("angle denominator exponent {0} exceeds 30")]
    AngleOverflow(u32),
    #[error("operand {index} of `{mnemonic}`: expected {expected:?}, got {got:?}")]
    SignatureMismatch {
        mnemonic: &'static str,
        index: usize,
        expected: OperandKind,
        got: OperandKind,
    },
    #[error("`{mnemonic}` takes {expected} operands, got {got}")]
    OperandCount {
        mnemonic: &'static str,
        expected: usize,
        got: usize,
    },
}

/// The five operand kinds of the language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperandKind {
    Immediate,
    Register,
    Address,
    ArrayEntry,
    ArraySlice,
}

impl OperandKind {
    /// Encoded width in bytes (fixed per kind).
    pub fn encoded_len(self) -> usize {
        match self {
            OperandKind::Immediate => 4,
            OperandKind::Register => 1,
            OperandKind::Address => 4,
            OperandKind::ArrayEntry => 5,
            OperandKind::ArraySlice => 6,
        }
    }
}

/// Register file names. Encoded in the high nibble of a register byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RegisterName {
    C = 0,
    R = 1,
    Q = 2,
    M = 3,
}

impl RegisterName {
    pub const ALL: [RegisterName; 4] = [
        RegisterName::C,
        RegisterName::R,
        RegisterName::Q,
        RegisterName::M,
    ];

    pub fn from_code(code: u8) -> Option<RegisterName> {
        match code {
            0 => Some(RegisterName::C),
            1 => Some(RegisterName::R),
            2 => Some(RegisterName::Q),
            3 => Some(RegisterName::M),
            _ => None,
        }
    }

    pub fn from_letter(letter: char) -> Option<RegisterName> {
        match letter {
            'C' => Some(RegisterName::C),
            'R' => Some(RegisterName::R),
            'Q' => Some(RegisterName::Q),
            'M' => Some(RegisterName::M),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            RegisterName::C => 'C',
            RegisterName::R => 'R',
            RegisterName::Q => 'Q',
            RegisterName::M => 'M',
        }
    }
}

/// Number of indices per register name.
pub const REGISTERS_PER_NAME: u8 = 16;

/// A reference to one register: name plus index `0..16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegisterRef {
    pub name: RegisterName,
    pub index: u8,
}

impl RegisterRef {
    pub fn new(name: RegisterName, index: u8) -> Option<RegisterRef> {
        (index < REGISTERS_PER_NAME).then_some(RegisterRef { name, index })
    }

    /// One-byte encoding: name code in the high nibble, index in the low.
    pub fn to_byte(self) -> u8 {
        ((self.name as u8) << 4) | self.index
    }

    pub fn from_byte(byte: u8) -> Option<RegisterRef> {
        let name = RegisterName::from_code(byte >> 4)?;
        RegisterRef::new(name, byte & 0x0F)
    }
}

impl fmt::Display for RegisterRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name.letter(), self.index)
    }
}

/// Instruction flavor: the core set or one of the registered gate flavors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    Core,
    Vanilla,
    Nv,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flavor::Core => write!(f, "core"),
            Flavor::Vanilla => write!(f, "vanilla"),
            Flavor::Nv => write!(f, "nv"),
        }
    }
}

macro_rules! opcodes {
    ($($variant:ident = $id:literal, $mnemonic:literal, $flavor:ident, [$($kind:ident),*];)*) => {
        /// Every opcode of the shipped instruction set.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        #[repr(u8)]
        pub enum Opcode {
            $($variant = $id,)*
        }

        impl Opcode {
            pub const ALL: &'static [Opcode] = &[$(Opcode::$variant,)*];

            pub fn from_id(id: u8) -> Result<Opcode, IsaError> {
                match id {
                    $($id => Ok(Opcode::$variant),)*
                    other => Err(IsaError::UnknownOpcode(other)),
                }
            }

            pub fn id(self) -> u8 {
                self as u8
            }

            pub fn mnemonic(self) -> &'static str {
                match self {
                    $(Opcode::$variant => $mnemonic,)*
                }
            }

            /// Which flavor the opcode belongs to. Determined by the id range.
            pub fn flavor(self) -> Flavor {
                match self {
                    $(Opcode::$variant => Flavor::$flavor,)*
                }
            }

            /// The fixed operand-kind list of the opcode.
            pub fn signature(self) -> &'static [OperandKind] {
                match self {
                    $(Opcode::$variant => &[$(OperandKind::$kind),*],)*
                }
            }
        }
    };
}

opcodes! {
    // classical
    Add  = 0x00, "add",  Core, [Register, Register, Register];
    Sub  = 0x01, "sub",  Core, [Register, Register, Register];
    Addm = 0x02, "addm", Core, [Register, Register, Register, Register];
    Subm = 0x03, "subm", Core, [Register, Register, Register, Register];
    // branch
    Jmp = 0x04, "jmp", Core, [Immediate];
    Bez = 0x05, "bez", Core, [Register, Immediate];
    Bnz = 0x06, "bnz", Core, [Register, Immediate];
    Beq = 0x07, "beq", Core, [Register, Register, Immediate];
    Bne = 0x08, "bne", Core, [Register, Register, Immediate];
    Blt = 0x09, "blt", Core, [Register, Register, Immediate];
    Bge = 0x0A, "bge", Core, [Register, Register, Immediate];
    // memory
    Set   = 0x0B, "set",   Core, [Register, Immediate];
    Store = 0x0C, "store", Core, [Register, ArrayEntry];
    Load  = 0x0D, "load",  Core, [Register, ArrayEntry];
    Undef = 0x0E, "undef", Core, [ArrayEntry];
    Lea   = 0x0F, "lea",   Core, [Register, Address];
    // allocation
    Array  = 0x10, "array",  Core, [Immediate, Address];
    Qalloc = 0x11, "qalloc", Core, [Register];
    Qfree  = 0x12, "qfree",  Core, [Register];
    // waiting
    WaitAll    = 0x13, "wait_all",    Core, [ArraySlice];
    WaitAny    = 0x14, "wait_any",    Core, [ArraySlice];
    WaitSingle = 0x15, "wait_single", Core, [ArrayEntry];
    // return
    RetReg = 0x16, "ret_reg", Core, [Register];
    RetArr = 0x17, "ret_arr", Core, [Address];
    // measurement
    Meas   = 0x18, "meas",    Core, [Register, Register];
    PmrXyx = 0x19, "pmr_xyx", Core, [Immediate, Immediate, Immediate, Immediate, Immediate, Immediate];
    PmrZxz = 0x1A, "pmr_zxz", Core, [Immediate, Immediate, Immediate, Immediate, Immediate, Immediate];
    PmrYzy = 0x1B, "pmr_yzy", Core, [Immediate, Immediate, Immediate, Immediate, Immediate, Immediate];
    // entanglement
    CreateEpr = 0x1C, "create_epr", Core, [Register, Register, Register, Register, Register];
    RecvEpr   = 0x1D, "recv_epr",   Core, [Register, Register, Register, Register];
    // vanilla flavor
    VInit   = 0x30, "init",   Vanilla, [Register];
    VX      = 0x31, "x",      Vanilla, [Register];
    VY      = 0x32, "y",      Vanilla, [Register];
    VZ      = 0x33, "z",      Vanilla, [Register];
    VH      = 0x34, "h",      Vanilla, [Register];
    VS      = 0x35, "s",      Vanilla, [Register];
    VK      = 0x36, "k",      Vanilla, [Register];
    VT      = 0x37, "t",      Vanilla, [Register];
    VRotX   = 0x38, "rot_x",  Vanilla, [Register, Immediate, Immediate];
    VRotY   = 0x39, "rot_y",  Vanilla, [Register, Immediate, Immediate];
    VRotZ   = 0x3A, "rot_z",  Vanilla, [Register, Immediate, Immediate];
    VCnot   = 0x3B, "cnot",   Vanilla, [Register, Register];
    VCphase = 0x3C, "cphase", Vanilla, [Register, Register];
    // NV flavor
    NvInit = 0x60, "init",   Nv, [Register];
    NvRotX = 0x61, "rot_x",  Nv, [Register, Immediate, Immediate];
    NvRotY = 0x62, "rot_y",  Nv, [Register, Immediate, Immediate];
    NvRotZ = 0x63, "rot_z",  Nv, [Register, Immediate, Immediate];
    NvCxDir = 0x64, "cx_dir", Nv, [Register, Register, Immediate, Immediate];
    NvCyDir = 0x65, "cy_dir", Nv, [Register, Register, Immediate, Immediate];
}

impl Opcode {
    /// Look a mnemonic up in the core set plus one gate flavor.
    pub fn from_mnemonic(mnemonic: &str, gate_flavor: Flavor) -> Result<Opcode, IsaError> {
        Opcode::ALL
            .iter()
            .copied()
            .find(|op| {
                op.mnemonic() == mnemonic
                    && (op.flavor() == Flavor::Core || op.flavor() == gate_flavor)
            })
            .ok_or_else(|| IsaError::UnknownMnemonic(mnemonic.to_string()))
    }

    /// True for the branch instructions whose target is an instruction index.
    pub fn is_branch(self) -> bool {
        matches!(
            self,
            Opcode::Jmp | Opcode::Bez | Opcode::Bnz | Opcode::Beq | Opcode::Bne | Opcode::Blt | Opcode::Bge
        )
    }

    /// Operand position of the branch target, if any.
    pub fn branch_target_index(self) -> Option<usize> {
        match self {
            Opcode::Jmp => Some(0),
            Opcode::Bez | Opcode::Bnz => Some(1),
            Opcode::Beq | Opcode::Bne | Opcode::Blt | Opcode::Bge => Some(2),
            _ => None,
        }
    }
}

/// A rotation angle `n * pi / 2^d`, kept exact through the toolchain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AngleSpec {
    pub n: i32,
    pub d: u32,
}

/// Maximum denominator exponent accepted for angles.
pub const MAX_ANGLE_DENOM: u32 = 30;

impl AngleSpec {
    pub fn new(n: i32, d: u32) -> Result<AngleSpec, IsaError> {
        if d > MAX_ANGLE_DENOM {
            return Err(IsaError::AngleOverflow(d));
        }
        Ok(AngleSpec { n, d })
    }

    /// The angle in radians.
    pub fn radians(self) -> f64 {
        self.n as f64 * std::f64::consts::PI / f64::from(1u32 << self.d)
    }

    /// Reduce to lowest terms and wrap into `(-4pi, 4pi]` (rotations repeat
    /// with period `4pi` as matrices).
    pub fn normalized(self) -> AngleSpec {
        let mut n = i64::from(self.n);
        let mut d = self.d;
        while d > 0 && n % 2 == 0 {
            n /= 2;
            d -= 1;
        }
        // period is n == 4 * 2^d in units of pi / 2^d
        let period = 4i64 << d;
        n = n.rem_euclid(period);
        if n > period / 2 {
            n -= period;
        }
        while d > 0 && n % 2 == 0 {
            n /= 2;
            d -= 1;
        }
        AngleSpec { n: n as i32, d }
    }

    /// Exact sum of two angles, normalized. Uses 64-bit intermediates so the
    /// common denominator cannot overflow.
    pub fn add(self, other: AngleSpec) -> AngleSpec {
        let d = self.d.max(other.d);
        let n = (i64::from(self.n) << (d - self.d)) + (i64::from(other.n) << (d - other.d));
        let period = 4i64 << d;
        let mut n = n.rem_euclid(period);
        if n > period / 2 {
            n -= period;
        }
        let mut d = d;
        while d > 0 && n % 2 == 0 {
            n /= 2;
            d -= 1;
        }
        AngleSpec { n: n as i32, d }
    }

    pub fn negate(self) -> AngleSpec {
        AngleSpec { n: -self.n, d: self.d }.normalized()
    }

    pub fn is_zero(self) -> bool {
        self.normalized().n == 0
    }

    /// True when the angle is an odd multiple of pi (the rotation is a Pauli
    /// up to global phase).
    pub fn is_pi_odd(self) -> bool {
        let a = self.normalized();
        a.d == 0 && a.n % 2 != 0
    }
}

/// Angle of `n * pi / 2^d` radians as a float; errors when `d > 30`.
pub fn angle_value(n: i32, d: u32) -> Result<f64, IsaError> {
    Ok(AngleSpec::new(n, d)?.radians())
}

/// Convenience table row for the generated ISA listing.
pub struct IsaTableRow {
    pub id: u8,
    pub mnemonic: &'static str,
    pub flavor: Flavor,
    pub signature: &'static [OperandKind],
}

/// The full instruction table, ordered by opcode id.
pub fn isa_table() -> Vec<IsaTableRow> {
    Opcode::ALL
        .iter()
        .map(|op| IsaTableRow {
            id: op.id(),
            mnemonic: op.mnemonic(),
            flavor: op.flavor(),
            signature: op.signature(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_unique_and_partitioned_by_flavor() {
        let mut seen = std::collections::HashSet::new();
        for op in Opcode::ALL {
            assert!(seen.insert(op.id()), "duplicate id {:#04x}", op.id());
            let range_flavor = match op.id() {
                0x00..=0x2F => Flavor::Core,
                0x30..=0x5F => Flavor::Vanilla,
                0x60..=0x7F => Flavor::Nv,
                _ => panic!("id {:#04x} outside all ranges", op.id()),
            };
            assert_eq!(op.flavor(), range_flavor);
        }
    }

    #[test]
    fn mnemonics_unique_within_core_plus_one_flavor() {
        for flavor in [Flavor::Vanilla, Flavor::Nv] {
            let mut seen = std::collections::HashSet::new();
            for op in Opcode::ALL {
                if op.flavor() == Flavor::Core || op.flavor() == flavor {
                    assert!(seen.insert(op.mnemonic()), "duplicate mnemonic {}", op.mnemonic());
                }
            }
        }
    }

    #[test]
    fn signatures_match_operand_counts() {
        assert_eq!(Opcode::Add.signature(), &[OperandKind::Register; 3]);
        assert_eq!(
            Opcode::CreateEpr.signature(),
            &[OperandKind::Register; 5]
        );
        assert_eq!(Opcode::Jmp.signature(), &[OperandKind::Immediate]);
        assert_eq!(Opcode::Meas.signature().len(), 2);
        assert_eq!(Opcode::PmrXyx.signature().len(), 6);
        assert_eq!(Opcode::WaitAll.signature(), &[OperandKind::ArraySlice]);
    }

    #[test]
    fn flavor_lookup() {
        assert_eq!(Opcode::Meas.flavor(), Flavor::Core);
        assert_eq!(Opcode::VCphase.flavor(), Flavor::Vanilla);
        assert_eq!(Opcode::NvCxDir.flavor(), Flavor::Nv);
        assert_eq!(Opcode::from_mnemonic("cphase", Flavor::Vanilla).unwrap(), Opcode::VCphase);
        assert_eq!(Opcode::from_mnemonic("rot_x", Flavor::Nv).unwrap(), Opcode::NvRotX);
        assert_eq!(Opcode::from_mnemonic("rot_x", Flavor::Vanilla).unwrap(), Opcode::VRotX);
        assert!(Opcode::from_mnemonic("cx_dir", Flavor::Vanilla).is_err());
    }

    #[test]
    fn angle_values() {
        assert_eq!(angle_value(1, 1).unwrap(), std::f64::consts::FRAC_PI_2);
        assert_eq!(angle_value(0, 0).unwrap(), 0.0);
        assert_eq!(angle_value(-1, 1).unwrap(), -std::f64::consts::FRAC_PI_2);
        assert_eq!(angle_value(1, 31), Err(IsaError::AngleOverflow(31)));
    }

    #[test]
    fn angle_halving_is_exact() {
        for d in 0..29 {
            for n in [-7, -1, 0, 1, 3, 5, 1000] {
                assert_eq!(
                    angle_value(n, d).unwrap(),
                    angle_value(2 * n, d + 1).unwrap()
                );
            }
        }
    }

    #[test]
    fn angle_normalization() {
        assert_eq!(AngleSpec { n: 2, d: 1 }.normalized(), AngleSpec { n: 1, d: 0 });
        assert_eq!(AngleSpec { n: 8, d: 1 }.normalized(), AngleSpec { n: 0, d: 0 });
        // pi/2 + pi/2 = pi
        let sum = AngleSpec { n: 1, d: 1 }.add(AngleSpec { n: 1, d: 1 });
        assert_eq!(sum, AngleSpec { n: 1, d: 0 });
        // pi/2 + -pi/2 = 0
        assert!(AngleSpec { n: 1, d: 1 }.add(AngleSpec { n: -1, d: 1 }).is_zero());
        assert!(AngleSpec { n: 3, d: 0 }.is_pi_odd());
        assert!(!AngleSpec { n: 2, d: 0 }.is_pi_odd());
    }

    #[test]
    fn register_byte_roundtrip() {
        let m3 = RegisterRef::new(RegisterName::M, 3).unwrap();
        assert_eq!(m3.to_byte(), 0x33);
        assert_eq!(RegisterRef::from_byte(0x33), Some(m3));
        assert_eq!(RegisterRef::from_byte(0x20).unwrap().to_string(), "Q0");
        assert!(RegisterRef::from_byte(0x40).is_none());
        assert!(RegisterRef::new(RegisterName::R, 16).is_none());
    }
}
