//! Per-application classical shared memory: the register file and the
//! fixed-length nullable-int arrays, plus the read-only application view.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::isa::{RegisterName, RegisterRef, REGISTERS_PER_NAME};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MemError {
    #[error("array address @{0} already in use")]
    AddressInUse(u32),
    #[error("no array at address @{0}")]
    NoSuchArray(u32),
    #[error("index {index} out of range for array @{address} of length {length}")]
    IndexOutOfRange { address: u32, index: u32, length: u32 },
    #[error("array @{address}[{index}] is null")]
    NullEntry { address: u32, index: u32 },
    #[error("slice [{start}:{stop}] of array @{address} is invalid")]
    BadSlice { address: u32, start: u32, stop: u32 },
}

/// Fixed-length vector of nullable 32-bit entries. Fresh entries are null.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayStore {
    entries: Vec<Option<i32>>,
}

impl ArrayStore {
    fn new(length: u32) -> ArrayStore {
        ArrayStore {
            entries: vec![None; length as usize],
        }
    }

    pub fn len(&self) -> u32 {
        self.entries.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Option<i32>] {
        &self.entries
    }
}

/// The quantifier of a slice-definedness query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    All,
    Any,
}

/// Register file (4 names x 16 slots, zero-initialized) plus arrays.
#[derive(Debug, Clone, Default)]
pub struct SharedMemory {
    registers: [[i32; REGISTERS_PER_NAME as usize]; 4],
    arrays: BTreeMap<u32, ArrayStore>,
}

impl SharedMemory {
    pub fn new() -> SharedMemory {
        SharedMemory::default()
    }

    pub fn reg_get(&self, reg: RegisterRef) -> i32 {
        self.registers[reg.name as usize][reg.index as usize]
    }

    pub fn reg_set(&mut self, reg: RegisterRef, value: i32) {
        self.registers[reg.name as usize][reg.index as usize] = value;
    }

    pub fn array_new(&mut self, length: u32, address: u32) -> Result<(), MemError> {
        if self.arrays.contains_key(&address) {
            return Err(MemError::AddressInUse(address));
        }
        self.arrays.insert(address, ArrayStore::new(length));
        Ok(())
    }

    pub fn array(&self, address: u32) -> Result<&ArrayStore, MemError> {
        self.arrays.get(&address).ok_or(MemError::NoSuchArray(address))
    }

    pub fn has_array(&self, address: u32) -> bool {
        self.arrays.contains_key(&address)
    }

    fn entry_mut(&mut self, address: u32, index: u32) -> Result<&mut Option<i32>, MemError> {
        let store = self
            .arrays
            .get_mut(&address)
            .ok_or(MemError::NoSuchArray(address))?;
        let length = store.len();
        store
            .entries
            .get_mut(index as usize)
            .ok_or(MemError::IndexOutOfRange { address, index, length })
    }

    pub fn array_store(&mut self, value: i32, address: u32, index: u32) -> Result<(), MemError> {
        *self.entry_mut(address, index)? = Some(value);
        Ok(())
    }

    pub fn array_load(&self, address: u32, index: u32) -> Result<i32, MemError> {
        let store = self.array(address)?;
        let entry = store
            .entries
            .get(index as usize)
            .ok_or(MemError::IndexOutOfRange { address, index, length: store.len() })?;
        entry.ok_or(MemError::NullEntry { address, index })
    }

    pub fn array_undef(&mut self, address: u32, index: u32) -> Result<(), MemError> {
        *self.entry_mut(address, index)? = None;
        Ok(())
    }

    pub fn entry_defined(&self, address: u32, index: u32) -> Result<bool, MemError> {
        let store = self.array(address)?;
        store
            .entries
            .get(index as usize)
            .map(|e| e.is_some())
            .ok_or(MemError::IndexOutOfRange { address, index, length: store.len() })
    }

    /// Definedness over `[start, stop)`. Empty slices: `All` holds, `Any`
    /// does not.
    pub fn slice_defined(
        &self,
        address: u32,
        start: u32,
        stop: u32,
        quantifier: Quantifier,
    ) -> Result<bool, MemError> {
        let store = self.array(address)?;
        if start > stop || stop > store.len() {
            return Err(MemError::BadSlice { address, start, stop });
        }
        let slice = &store.entries[start as usize..stop as usize];
        Ok(match quantifier {
            Quantifier::All => slice.iter().all(|e| e.is_some()),
            Quantifier::Any => slice.iter().any(|e| e.is_some()),
        })
    }

    pub fn drop_all_arrays(&mut self) {
        self.arrays.clear();
    }
}

/// Read-only snapshot of the returned registers and arrays. Updated only at
/// update points; content for items not re-returned is retained.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AppView {
    registers: BTreeMap<RegisterRef, i32>,
    arrays: BTreeMap<u32, Vec<Option<i32>>>,
}

impl AppView {
    pub fn register(&self, reg: RegisterRef) -> Option<i32> {
        self.registers.get(&reg).copied()
    }

    pub fn register_by_str(&self, name: RegisterName, index: u8) -> Option<i32> {
        RegisterRef::new(name, index).and_then(|r| self.register(r))
    }

    pub fn array(&self, address: u32) -> Option<&[Option<i32>]> {
        self.arrays.get(&address).map(|v| v.as_slice())
    }

    pub fn registers(&self) -> &BTreeMap<RegisterRef, i32> {
        &self.registers
    }

    pub fn arrays(&self) -> &BTreeMap<u32, Vec<Option<i32>>> {
        &self.arrays
    }

    /// Apply an update point: snapshot the given registers and arrays from
    /// memory into the view.
    pub fn update(
        &mut self,
        mem: &SharedMemory,
        registers: &[RegisterRef],
        arrays: &[u32],
    ) -> Result<(), MemError> {
        for &reg in registers {
            self.registers.insert(reg, mem.reg_get(reg));
        }
        for &address in arrays {
            let store = mem.array(address)?;
            self.arrays.insert(address, store.entries().to_vec());
        }
        Ok(())
    }
}
