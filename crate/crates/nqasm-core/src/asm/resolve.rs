//! Label resolution and lowering into the binary-ready form.

use std::collections::HashMap;

use super::{
    scratch, AsmError, AsmWarning, RegOrImm, SymOperand, SymbolicInstruction, SymbolicItem,
    SymbolicSubroutine, SCRATCH_REGISTERS,
};
use crate::isa::{Opcode, OperandKind, RegisterName, RegisterRef};
use crate::program::{Instruction, Operand, Subroutine};

/// Result of a full [`resolve`].
#[derive(Debug, Clone)]
pub struct Resolved {
    pub subroutine: Subroutine,
    pub warnings: Vec<AsmWarning>,
    /// Number of `set` instructions inserted by lowering.
    pub sets_inserted: usize,
    /// Number of `lea` instructions inserted by lowering.
    pub leas_inserted: usize,
}

fn label_map(sub: &SymbolicSubroutine) -> HashMap<String, i32> {
    let mut map = HashMap::new();
    for (index, item) in sub.items.iter().enumerate() {
        for label in &item.labels {
            map.insert(label.clone(), index as i32);
        }
    }
    for label in &sub.trailing_labels {
        map.insert(label.clone(), sub.items.len() as i32);
    }
    map
}

/// Replace every label operand by the instruction index it precedes
/// (end labels resolve to the instruction count). No other transformation:
/// immediates in register slots stay as written.
pub fn resolve_labels(sub: &SymbolicSubroutine) -> Result<SymbolicSubroutine, AsmError> {
    let labels = label_map(sub);
    let mut items = Vec::with_capacity(sub.items.len());
    for item in &sub.items {
        let mut operands = Vec::with_capacity(item.instruction.operands.len());
        for operand in &item.instruction.operands {
            let resolved = match operand {
                SymOperand::Label(name) => {
                    let index = labels
                        .get(name)
                        .copied()
                        .ok_or_else(|| AsmError::UndefinedLabel(name.clone()))?;
                    SymOperand::Immediate(index)
                }
                other => other.clone(),
            };
            operands.push(resolved);
        }
        items.push(SymbolicItem {
            labels: Vec::new(),
            instruction: SymbolicInstruction {
                opcode: item.instruction.opcode,
                operands,
                line: item.instruction.line,
            },
        });
    }
    Ok(SymbolicSubroutine {
        metadata: sub.metadata.clone(),
        items,
        trailing_labels: Vec::new(),
    })
}

struct Lowering {
    items: Vec<SymbolicItem>,
    sets: usize,
    leas: usize,
}

/// Insert `set`/`lea` instructions so that every operand matches its
/// signature kind: immediates or addresses in REGISTER slots and immediate
/// array indices are moved into the reserved scratch registers. Labels on a
/// lowered instruction move to its first inserted instruction so that branch
/// semantics re-run the scratch loads.
pub fn lower(sub: &SymbolicSubroutine) -> Result<SymbolicSubroutine, AsmError> {
    Ok(lower_counted(sub)?.0)
}

fn lower_counted(sub: &SymbolicSubroutine) -> Result<(SymbolicSubroutine, usize, usize), AsmError> {
    let mut out = Lowering {
        items: Vec::with_capacity(sub.items.len()),
        sets: 0,
        leas: 0,
    };
    for (index, item) in sub.items.iter().enumerate() {
        lower_item(item, index, &mut out)?;
    }
    Ok((
        SymbolicSubroutine {
            metadata: sub.metadata.clone(),
            items: out.items,
            trailing_labels: sub.trailing_labels.clone(),
        },
        out.sets,
        out.leas,
    ))
}

fn lower_item(item: &SymbolicItem, index: usize, out: &mut Lowering) -> Result<(), AsmError> {
    let instr = &item.instruction;
    let line = instr.line;
    let sig = instr.opcode.signature();
    let mut inserted: Vec<SymbolicInstruction> = Vec::new();
    let mut slot = 0usize;
    let mut next_scratch = |inserted: &mut Vec<SymbolicInstruction>,
                            opcode: Opcode,
                            value: SymOperand|
     -> Result<RegisterRef, AsmError> {
        let reg = scratch(slot).ok_or(AsmError::NotLowerable(index))?;
        slot += 1;
        inserted.push(SymbolicInstruction {
            opcode,
            operands: vec![SymOperand::Register(reg), value],
            line,
        });
        Ok(reg)
    };

    let mut operands = Vec::with_capacity(instr.operands.len());
    for (operand, expected) in instr.operands.iter().zip(sig) {
        let lowered = match (expected, operand) {
            (OperandKind::Register, SymOperand::Immediate(v)) => {
                let reg = next_scratch(&mut inserted, Opcode::Set, SymOperand::Immediate(*v))?;
                out.sets += 1;
                SymOperand::Register(reg)
            }
            (OperandKind::Register, SymOperand::Address(a)) => {
                let reg = next_scratch(&mut inserted, Opcode::Lea, SymOperand::Address(*a))?;
                out.leas += 1;
                SymOperand::Register(reg)
            }
            (OperandKind::ArrayEntry, SymOperand::ArrayEntry { address, index: RegOrImm::Imm(v) }) => {
                let reg = next_scratch(&mut inserted, Opcode::Set, SymOperand::Immediate(*v))?;
                out.sets += 1;
                SymOperand::ArrayEntry { address: *address, index: RegOrImm::Reg(reg) }
            }
            (OperandKind::ArraySlice, SymOperand::ArraySlice { address, start, stop }) => {
                let start = match start {
                    RegOrImm::Imm(v) => {
                        let reg =
                            next_scratch(&mut inserted, Opcode::Set, SymOperand::Immediate(*v))?;
                        out.sets += 1;
                        RegOrImm::Reg(reg)
                    }
                    keep => *keep,
                };
                let stop = match stop {
                    RegOrImm::Imm(v) => {
                        let reg =
                            next_scratch(&mut inserted, Opcode::Set, SymOperand::Immediate(*v))?;
                        out.sets += 1;
                        RegOrImm::Reg(reg)
                    }
                    keep => *keep,
                };
                SymOperand::ArraySlice { address: *address, start, stop }
            }
            _ => operand.clone(),
        };
        operands.push(lowered);
    }

    let mut labels = item.labels.clone();
    for (i, ins) in inserted.into_iter().enumerate() {
        out.items.push(SymbolicItem {
            labels: if i == 0 { std::mem::take(&mut labels) } else { Vec::new() },
            instruction: ins,
        });
    }
    out.items.push(SymbolicItem {
        labels,
        instruction: SymbolicInstruction {
            opcode: instr.opcode,
            operands,
            line,
        },
    });
    Ok(())
}

fn to_strict(instr: &SymbolicInstruction, index: usize) -> Result<Instruction, AsmError> {
    let mut operands = Vec::with_capacity(instr.operands.len());
    for operand in &instr.operands {
        let strict = match operand {
            SymOperand::Immediate(v) => Operand::Immediate(*v),
            SymOperand::Register(r) => Operand::Register(*r),
            SymOperand::Address(a) => Operand::Address(*a),
            SymOperand::ArrayEntry { address, index: RegOrImm::Reg(r) } => {
                Operand::ArrayEntry { address: *address, index: *r }
            }
            SymOperand::ArraySlice {
                address,
                start: RegOrImm::Reg(s),
                stop: RegOrImm::Reg(e),
            } => Operand::ArraySlice { address: *address, start: *s, stop: *e },
            _ => return Err(AsmError::NotLowerable(index)),
        };
        operands.push(strict);
    }
    Instruction::new(instr.opcode, operands).map_err(|source| AsmError::Signature {
        source,
        line: instr.line,
    })
}

fn scratch_collisions(sub: &SymbolicSubroutine) -> Vec<AsmWarning> {
    let mut warnings = Vec::new();
    for item in &sub.items {
        for operand in &item.instruction.operands {
            let regs: Vec<RegisterRef> = match operand {
                SymOperand::Register(r) => vec![*r],
                SymOperand::ArrayEntry { index: RegOrImm::Reg(r), .. } => vec![*r],
                SymOperand::ArraySlice { start, stop, .. } => [start, stop]
                    .iter()
                    .filter_map(|ri| match ri {
                        RegOrImm::Reg(r) => Some(*r),
                        RegOrImm::Imm(_) => None,
                    })
                    .collect(),
                _ => vec![],
            };
            for reg in regs {
                if reg.name == RegisterName::R && SCRATCH_REGISTERS.contains(&reg.index) {
                    warnings.push(AsmWarning::ReservedRegisterCollision {
                        register: reg,
                        line: item.instruction.line,
                    });
                }
            }
        }
    }
    warnings
}

/// Full resolution: lowering first, then label resolution (so label indices
/// account for every insertion), then conversion to the strict form.
pub fn resolve(sub: &SymbolicSubroutine) -> Result<Resolved, AsmError> {
    let (lowered, sets, leas) = lower_counted(sub)?;
    let warnings = if sets + leas > 0 {
        scratch_collisions(sub)
    } else {
        Vec::new()
    };
    let labeled = resolve_labels(&lowered)?;
    let instructions = labeled
        .items
        .iter()
        .enumerate()
        .map(|(index, item)| to_strict(&item.instruction, index))
        .collect::<Result<Vec<_>, _>>()?;
    let subroutine = Subroutine::new(
        labeled.metadata.version,
        labeled.metadata.app_id,
        instructions,
    );
    subroutine.check()?;
    Ok(Resolved {
        subroutine,
        warnings,
        sets_inserted: sets,
        leas_inserted: leas,
    })
}
