/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const default_domain_words: () => [number, number];
export const demo_compare: (a: number, b: number, c: number) => [number, number];
export const demo_new: (a: number, b: number) => number;
export const demo_tokenize: (a: number, b: number, c: number) => [number, number];
export const demo_trace: (a: number, b: number, c: number) => [number, number];
export const sample_corpus: () => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
