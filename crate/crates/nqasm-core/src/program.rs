//! Resolved program representation: operands, instructions, subroutines.
//!
//! A [`Subroutine`] is binary-ready: every operand matches its opcode
//! signature exactly, branch labels are gone and array indices are registers.
//! The looser text-side representation lives in [`crate::asm`].

use crate::isa::{IsaError, Opcode, OperandKind, RegisterRef};

/// A fully lowered operand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operand {
    Immediate(i32),
    Register(RegisterRef),
    /// Array address: an opaque 32-bit identifier, not a memory offset.
    Address(u32),
    ArrayEntry {
        address: u32,
        index: RegisterRef,
    },
    ArraySlice {
        address: u32,
        start: RegisterRef,
        stop: RegisterRef,
    },
}

impl Operand {
    pub fn kind(&self) -> OperandKind {
        match self {
            Operand::Immediate(_) => OperandKind::Immediate,
            Operand::Register(_) => OperandKind::Register,
            Operand::Address(_) => OperandKind::Address,
            Operand::ArrayEntry { .. } => OperandKind::ArrayEntry,
            Operand::ArraySlice { .. } => OperandKind::ArraySlice,
        }
    }
}

/// One instruction whose operands match the opcode signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instruction {
    opcode: Opcode,
    operands: Vec<Operand>,
}

impl Instruction {
    pub fn new(opcode: Opcode, operands: Vec<Operand>) -> Result<Instruction, IsaError> {
        let sig = opcode.signature();
        if operands.len() != sig.len() {
            return Err(IsaError::OperandCount {
                mnemonic: opcode.mnemonic(),
                expected: sig.len(),
                got: operands.len(),
            });
        }
        for (index, (operand, expected)) in operands.iter().zip(sig).enumerate() {
            if operand.kind() != *expected {
                return Err(IsaError::SignatureMismatch {
                    mnemonic: opcode.mnemonic(),
                    index,
                    expected: *expected,
                    got: operand.kind(),
                });
            }
        }
        Ok(Instruction { opcode, operands })
    }

    pub fn opcode(&self) -> Opcode {
        self.opcode
    }

    pub fn operands(&self) -> &[Operand] {
        &self.operands
    }

    pub fn register(&self, index: usize) -> RegisterRef {
        match self.operands[index] {
            Operand::Register(r) => r,
            ref other => panic!(
                "operand {index} of {} is {other:?}, not a register",
                self.opcode.mnemonic()
            ),
        }
    }

    pub fn immediate(&self, index: usize) -> i32 {
        match self.operands[index] {
            Operand::Immediate(v) => v,
            ref other => panic!(
                "operand {index} of {} is {other:?}, not an immediate",
                self.opcode.mnemonic()
            ),
        }
    }
}

/// Subroutine metadata plus the ordered instruction list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subroutine {
    pub version: (u8, u8),
    pub app_id: i32,
    pub instructions: Vec<Instruction>,
}

impl Subroutine {
    pub fn new(version: (u8, u8), app_id: i32, instructions: Vec<Instruction>) -> Subroutine {
        Subroutine {
            version,
            app_id,
            instructions,
        }
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Check the structural invariants: branch targets within
    /// `[0, instruction count]` and all gate opcodes from a single flavor.
    pub fn check(&self) -> Result<(), SubroutineError> {
        let count = self.instructions.len() as i64;
        let mut gate_flavor = None;
        for (at, instr) in self.instructions.iter().enumerate() {
            if let Some(pos) = instr.opcode().branch_target_index() {
                let target = i64::from(instr.immediate(pos));
                if target < 0 || target > count {
                    return Err(SubroutineError::BranchOutOfRange { at, target });
                }
            }
            let flavor = instr.opcode().flavor();
            if flavor != crate::isa::Flavor::Core {
                match gate_flavor {
                    None => gate_flavor = Some(flavor),
                    Some(f) if f == flavor => {}
                    Some(f) => {
                        return Err(SubroutineError::MixedFlavors {
                            at,
                            first: f,
                            second: flavor,
                        })
                    }
                }
            }
        }
        Ok(())
    }

    /// The gate flavor used by this subroutine, if any gate instruction is
    /// present. Core-only subroutines return `None`.
    pub fn gate_flavor(&self) -> Option<crate::isa::Flavor> {
        self.instructions
            .iter()
            .map(|i| i.opcode().flavor())
            .find(|f| *f != crate::isa::Flavor::Core)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SubroutineError {
    #[error("instruction {at}: branch target {target} out of range")]
    BranchOutOfRange { at: usize, target: i64 },
    #[error("instruction {at}: mixes {first} and {second} flavor opcodes")]
    MixedFlavors {
        at: usize,
        first: crate::isa::Flavor,
        second: crate::isa::Flavor,
    },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isa::{Flavor, RegisterName};

    fn reg(name: RegisterName, index: u8) -> Operand {
        Operand::Register(RegisterRef::new(name, index).unwrap())
    }

    #[test]
    fn signature_checked_on_construction() {
        let ok = Instruction::new(
            Opcode::Set,
            vec![reg(RegisterName::Q, 0), Operand::Immediate(0)],
        );
        assert!(ok.is_ok());
        let bad = Instruction::new(Opcode::Set, vec![Operand::Immediate(1), Operand::Immediate(0)]);
        assert!(matches!(bad, Err(IsaError::SignatureMismatch { .. })));
        let short = Instruction::new(Opcode::Set, vec![reg(RegisterName::Q, 0)]);
        assert!(matches!(short, Err(IsaError::OperandCount { .. })));
    }

    #[test]
    fn branch_range_checked() {
        let sub = Subroutine::new(
            (1, 0),
            0,
            vec![Instruction::new(Opcode::Jmp, vec![Operand::Immediate(2)]).unwrap()],
        );
        assert!(matches!(
            sub.check(),
            Err(SubroutineError::BranchOutOfRange { at: 0, target: 2 })
        ));
        let ok = Subroutine::new(
            (1, 0),
            0,
            vec![Instruction::new(Opcode::Jmp, vec![Operand::Immediate(1)]).unwrap()],
        );
        assert!(ok.check().is_ok());
    }

    #[test]
    fn mixed_flavors_rejected() {
        let sub = Subroutine::new(
            (1, 0),
            0,
            vec![
                Instruction::new(Opcode::VH, vec![reg(RegisterName::Q, 0)]).unwrap(),
                Instruction::new(Opcode::NvInit, vec![reg(RegisterName::Q, 0)]).unwrap(),
            ],
        );
        assert!(matches!(sub.check(), Err(SubroutineError::MixedFlavors { .. })));
        assert_eq!(sub.gate_flavor(), Some(Flavor::Vanilla));
    }
}
