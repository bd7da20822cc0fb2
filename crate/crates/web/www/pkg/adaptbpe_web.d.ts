/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Fragment-score comparison over a corpus with one document per line.
     */
    compare(corpus: string): string;
    /**
     * Builds the bundled vocabulary extended with `domain_words`.
     */
    constructor(domain_words: string);
    /**
     * Both segmentations of `text` plus the AdaptBPE initialization of each pre-token.
     */
    tokenize(text: string): string;
    /**
     * Merge traces for every pre-token of `text` under both modes.
     */
    trace(text: string): string;
}

/**
 * Default domain words, one per line, as a user would type them.
 */
export function default_domain_words(): string;

export function sample_corpus(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly default_domain_words: () => [number, number];
    readonly demo_compare: (a: number, b: number, c: number) => [number, number];
    readonly demo_new: (a: number, b: number) => number;
    readonly demo_tokenize: (a: number, b: number, c: number) => [number, number];
    readonly demo_trace: (a: number, b: number, c: number) => [number, number];
    readonly sample_corpus: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
