//! Line parser for the preprocessed body.

use super::preprocess::BodyLine;
use super::{
    AsmError, RegOrImm, SourceMetadata, SymOperand, SymbolicInstruction, SymbolicItem,
    SymbolicSubroutine,
};
use crate::isa::{Flavor, Opcode, OperandKind, RegisterName, RegisterRef, REGISTERS_PER_NAME};

fn is_label_decl(text: &str) -> Option<&str> {
    let name = text.strip_suffix(':')?;
    if !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !name.chars().next().unwrap().is_ascii_digit()
    {
        Some(name)
    } else {
        None
    }
}

fn parse_register(text: &str, line: u32) -> Result<Option<RegisterRef>, AsmError> {
    let mut chars = text.chars();
    let first = match chars.next() {
        Some(c) if c.is_ascii_uppercase() => c,
        _ => return Ok(None),
    };
    let rest: String = chars.collect();
    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
        return Ok(None);
    }
    let name = RegisterName::from_letter(first)
        .ok_or(AsmError::UnknownRegisterName { name: first, line })?;
    let index: u32 = rest
        .parse()
        .map_err(|_| AsmError::InvalidRegisterIndex { index: u32::MAX, line })?;
    if index >= u32::from(REGISTERS_PER_NAME) {
        return Err(AsmError::InvalidRegisterIndex { index, line });
    }
    Ok(Some(RegisterRef::new(name, index as u8).unwrap()))
}

fn parse_reg_or_imm(text: &str, line: u32) -> Result<RegOrImm, AsmError> {
    if let Some(reg) = parse_register(text, line)? {
        return Ok(RegOrImm::Reg(reg));
    }
    text.parse::<i32>()
        .map(RegOrImm::Imm)
        .map_err(|_| AsmError::BadOperand { text: text.to_string(), line })
}

fn parse_operand(text: &str, line: u32) -> Result<SymOperand, AsmError> {
    if let Some(rest) = text.strip_prefix('@') {
        let (addr_text, bracket) = match rest.find('[') {
            Some(i) => (&rest[..i], Some(&rest[i..])),
            None => (rest, None),
        };
        let address: u32 = addr_text
            .parse()
            .map_err(|_| AsmError::BadOperand { text: text.to_string(), line })?;
        let Some(bracket) = bracket else {
            return Ok(SymOperand::Address(address));
        };
        let inner = bracket
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| AsmError::BadOperand { text: text.to_string(), line })?;
        if let Some((start, stop)) = inner.split_once(':') {
            return Ok(SymOperand::ArraySlice {
                address,
                start: parse_reg_or_imm(start, line)?,
                stop: parse_reg_or_imm(stop, line)?,
            });
        }
        return Ok(SymOperand::ArrayEntry {
            address,
            index: parse_reg_or_imm(inner, line)?,
        });
    }
    if let Some(reg) = parse_register(text, line)? {
        return Ok(SymOperand::Register(reg));
    }
    if let Ok(value) = text.parse::<i32>() {
        return Ok(SymOperand::Immediate(value));
    }
    if text
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !text.chars().next().unwrap_or('0').is_ascii_digit()
    {
        return Ok(SymOperand::Label(text.to_string()));
    }
    Err(AsmError::BadOperand { text: text.to_string(), line })
}

/// Statically check an operand against its signature slot. Immediates and
/// addresses are accepted where a register is demanded (they get lowered);
/// labels are accepted only in branch-target slots.
fn check_slot(
    opcode: Opcode,
    index: usize,
    operand: &SymOperand,
    expected: OperandKind,
    line: u32,
) -> Result<(), AsmError> {
    let got = match operand {
        SymOperand::Immediate(_) => OperandKind::Immediate,
        SymOperand::Register(_) => OperandKind::Register,
        SymOperand::Address(_) => OperandKind::Address,
        SymOperand::ArrayEntry { .. } => OperandKind::ArrayEntry,
        SymOperand::ArraySlice { .. } => OperandKind::ArraySlice,
        SymOperand::Label(name) => {
            if opcode.branch_target_index() == Some(index) {
                return Ok(());
            }
            return Err(AsmError::LabelOutsideBranch {
                label: name.clone(),
                line,
            });
        }
    };
    let ok = match expected {
        OperandKind::Register => matches!(
            got,
            OperandKind::Register | OperandKind::Immediate | OperandKind::Address
        ),
        other => got == other,
    };
    if ok {
        Ok(())
    } else {
        Err(AsmError::Signature {
            source: crate::isa::IsaError::SignatureMismatch {
                mnemonic: opcode.mnemonic(),
                index,
                expected,
                got,
            },
            line,
        })
    }
}

/// Parse the preprocessed body into a symbolic subroutine. `flavor` selects
/// which gate flavor the mnemonic table includes besides the core set.
pub fn parse(
    body: &[BodyLine],
    metadata: SourceMetadata,
    flavor: Flavor,
) -> Result<SymbolicSubroutine, AsmError> {
    let mut items: Vec<SymbolicItem> = Vec::new();
    let mut pending_labels: Vec<String> = Vec::new();
    let mut seen_labels: std::collections::HashSet<String> = std::collections::HashSet::new();

    for BodyLine { line, text } in body {
        let line = *line;
        if let Some(label) = is_label_decl(text) {
            if !seen_labels.insert(label.to_string()) {
                return Err(AsmError::DuplicateLabel { label: label.to_string(), line });
            }
            pending_labels.push(label.to_string());
            continue;
        }
        let mut parts = text.split_whitespace();
        let mnemonic = parts.next().expect("blank lines were dropped");
        let opcode = Opcode::from_mnemonic(mnemonic, flavor).map_err(|_| {
            AsmError::UnknownMnemonic { mnemonic: mnemonic.to_string(), line }
        })?;
        let operands = parts
            .map(|op| parse_operand(op, line))
            .collect::<Result<Vec<_>, _>>()?;
        let sig = opcode.signature();
        if operands.len() != sig.len() {
            return Err(AsmError::Signature {
                source: crate::isa::IsaError::OperandCount {
                    mnemonic: opcode.mnemonic(),
                    expected: sig.len(),
                    got: operands.len(),
                },
                line,
            });
        }
        for (index, (operand, expected)) in operands.iter().zip(sig).enumerate() {
            check_slot(opcode, index, operand, *expected, line)?;
        }
        items.push(SymbolicItem {
            labels: std::mem::take(&mut pending_labels),
            instruction: SymbolicInstruction { opcode, operands, line },
        });
    }

    Ok(SymbolicSubroutine {
        metadata,
        items,
        trailing_labels: pending_labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asm::preprocess::preprocess;

    fn parse_src(src: &str) -> Result<SymbolicSubroutine, AsmError> {
        let (meta, body) = preprocess(src)?;
        parse(&body, meta, Flavor::Vanilla)
    }

    const HEADER: &str = "# NETQASM 1.0\n# APPID 0\n";

    #[test]
    fn meas_example() {
        let sub = parse_src(&format!("{HEADER}meas Q0 M0\n")).unwrap();
        assert_eq!(sub.items.len(), 1);
        let instr = &sub.items[0].instruction;
        assert_eq!(instr.opcode, Opcode::Meas);
        assert_eq!(
            instr.operands,
            vec![
                SymOperand::Register(RegisterRef::new(RegisterName::Q, 0).unwrap()),
                SymOperand::Register(RegisterRef::new(RegisterName::M, 0).unwrap()),
            ]
        );
    }

    #[test]
    fn slice_operand() {
        let sub = parse_src(&format!("{HEADER}wait_all @0[1:4]\n")).unwrap();
        assert_eq!(
            sub.items[0].instruction.operands,
            vec![SymOperand::ArraySlice {
                address: 0,
                start: RegOrImm::Imm(1),
                stop: RegOrImm::Imm(4),
            }]
        );
    }

    #[test]
    fn unknown_register_name() {
        let err = parse_src(&format!("{HEADER}h X5\n")).unwrap_err();
        assert!(matches!(err, AsmError::UnknownRegisterName { name: 'X', .. }));
    }

    #[test]
    fn register_index_bound() {
        let err = parse_src(&format!("{HEADER}h Q16\n")).unwrap_err();
        assert!(matches!(err, AsmError::InvalidRegisterIndex { index: 16, .. }));
    }

    #[test]
    fn labels_attach_to_next_instruction() {
        let sub = parse_src(&format!("{HEADER}LOOP:\njmp LOOP\nEXIT:\n")).unwrap();
        assert_eq!(sub.items[0].labels, vec!["LOOP".to_string()]);
        assert_eq!(sub.trailing_labels, vec!["EXIT".to_string()]);
    }

    #[test]
    fn duplicate_label_rejected() {
        let err = parse_src(&format!("{HEADER}A:\nset Q0 0\nA:\nset Q0 1\n")).unwrap_err();
        assert!(matches!(err, AsmError::DuplicateLabel { .. }));
    }

    #[test]
    fn label_not_allowed_outside_branch_target() {
        let err = parse_src(&format!("{HEADER}set Q0 FOO\n")).unwrap_err();
        assert!(matches!(err, AsmError::LabelOutsideBranch { .. }));
    }

    #[test]
    fn operand_count_mismatch() {
        let err = parse_src(&format!("{HEADER}add R0 R1\n")).unwrap_err();
        assert!(matches!(err, AsmError::Signature { .. }));
    }

    #[test]
    fn nv_flavor_lookup() {
        let (meta, body) = preprocess(&format!("{HEADER}cx_dir Q0 Q1 1 1\n")).unwrap();
        let sub = parse(&body, meta, Flavor::Nv).unwrap();
        assert_eq!(sub.items[0].instruction.opcode, Opcode::NvCxDir);
    }
}
