//! Canonical text output for both symbolic and resolved subroutines.

use std::fmt::Write;

use super::{RegOrImm, SymOperand, SymbolicSubroutine};
use crate::program::{Operand, Subroutine};

fn fmt_reg_or_imm(out: &mut String, value: &RegOrImm) {
    match value {
        RegOrImm::Reg(r) => {
            let _ = write!(out, "{r}");
        }
        RegOrImm::Imm(v) => {
            let _ = write!(out, "{v}");
        }
    }
}

fn fmt_sym_operand(out: &mut String, operand: &SymOperand) {
    match operand {
        SymOperand::Immediate(v) => {
            let _ = write!(out, "{v}");
        }
        SymOperand::Register(r) => {
            let _ = write!(out, "{r}");
        }
        SymOperand::Address(a) => {
            let _ = write!(out, "@{a}");
        }
        SymOperand::ArrayEntry { address, index } => {
            let _ = write!(out, "@{address}[");
            fmt_reg_or_imm(out, index);
            out.push(']');
        }
        SymOperand::ArraySlice { address, start, stop } => {
            let _ = write!(out, "@{address}[");
            fmt_reg_or_imm(out, start);
            out.push(':');
            fmt_reg_or_imm(out, stop);
            out.push(']');
        }
        SymOperand::Label(name) => out.push_str(name),
    }
}

fn header(version: (u8, u8), app_id: i32) -> String {
    format!("# NETQASM {}.{}\n# APPID {}\n", version.0, version.1, app_id)
}

/// Canonical text of a symbolic subroutine, labels included.
pub fn print_symbolic(sub: &SymbolicSubroutine) -> String {
    let mut out = header(sub.metadata.version, sub.metadata.app_id);
    for item in &sub.items {
        for label in &item.labels {
            let _ = writeln!(out, "{label}:");
        }
        out.push_str(item.instruction.opcode.mnemonic());
        for operand in &item.instruction.operands {
            out.push(' ');
            fmt_sym_operand(&mut out, operand);
        }
        out.push('\n');
    }
    for label in &sub.trailing_labels {
        let _ = writeln!(out, "{label}:");
    }
    out
}

/// Canonical text of a resolved subroutine. `parse` of the output followed by
/// `resolve` reproduces the input exactly.
pub fn print_subroutine(sub: &Subroutine) -> String {
    let mut out = header(sub.version, sub.app_id);
    for instr in &sub.instructions {
        out.push_str(instr.opcode().mnemonic());
        for operand in instr.operands() {
            out.push(' ');
            match *operand {
                Operand::Immediate(v) => {
                    let _ = write!(out, "{v}");
                }
                Operand::Register(r) => {
                    let _ = write!(out, "{r}");
                }
                Operand::Address(a) => {
                    let _ = write!(out, "@{a}");
                }
                Operand::ArrayEntry { address, index } => {
                    let _ = write!(out, "@{address}[{index}]");
                }
                Operand::ArraySlice { address, start, stop } => {
                    let _ = write!(out, "@{address}[{start}:{stop}]");
                }
            }
        }
        out.push('\n');
    }
    out
}
