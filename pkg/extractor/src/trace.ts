/**
 * Call-trace importer: plain-text lines `caller<TAB>callee<TAB>kind` become
 * raw triads [callerSymbol, contextAlias, calleeSymbol].
 *
 * Generic role symbols are assigned by first appearance (A, B, C, ...);
 * the alphabet caps at 26 distinct classes. The kind descriptor (usually
 * the callee method name or a tag like "constructor"/"static") is mapped to
 * a context category through a configurable keyword table; an optional
 * `:N` suffix carries the body line count used to split ordinary calls
 * from general processing.
 */

import { readFileSync } from 'node:fs';

export interface KeywordTable {
  constructor_keywords: string[];
  getter_setter_prefixes: string[];
  static_keywords: string[];
  inheritance_keywords: string[];
  cloning_keywords: string[];
  general_body_lines: number;
}

export const DEFAULT_KEYWORDS: KeywordTable = {
  constructor_keywords: ['constructor', '__init__', 'init', 'new'],
  getter_setter_prefixes: ['get_', 'set_'],
  static_keywords: ['static'],
  inheritance_keywords: ['inherited', 'virtual', 'super', 'override', 'dispatch'],
  cloning_keywords: ['clone', 'copy', 'deepcopy'],
  general_body_lines: 10,
};

export class TraceFormatError extends Error {
  constructor(message: string, public readonly line: number) {
    super(message);
    this.name = 'TraceFormatError';
  }
}

export class SymbolSpaceExhausted extends Error {
  constructor(public readonly className: string) {
    super(`symbol_space_exhausted: 27th distinct class '${className}' exceeds the A..Z alphabet`);
    this.name = 'SymbolSpaceExhausted';
  }
}

const ALPHABET = 'ABCDEFGHIJKLMNOPQRSTUVWXYZ';

export function loadKeywordTable(path: string): KeywordTable {
  const doc = JSON.parse(readFileSync(path, 'utf-8'));
  return { ...DEFAULT_KEYWORDS, ...doc };
}

/** Map a kind descriptor (and optional `:N` body size) to a context alias. */
export function classifyContext(kindRaw: string, keywords: KeywordTable = DEFAULT_KEYWORDS): string {
  let descriptor = kindRaw.trim();
  let bodyLines: number | null = null;
  const sized = /^(.*):(\d+)$/.exec(descriptor);
  if (sized) {
    descriptor = sized[1].trim();
    bodyLines = parseInt(sized[2], 10);
  }
  const lower = descriptor.toLowerCase();

  if (keywords.constructor_keywords.includes(lower)) return 'SIGMA';
  if (keywords.getter_setter_prefixes.some((p) => lower.startsWith(p))) return 'PHI';
  if (keywords.static_keywords.some((k) => lower.includes(k))) return 'T';
  if (keywords.inheritance_keywords.some((k) => lower.includes(k))) return 'OMEGA';
  if (keywords.cloning_keywords.some((k) => lower.includes(k))) return 'XI';
  if (bodyLines !== null && bodyLines > keywords.general_body_lines) return 'GAMMA';
  return 'LAMBDA';
}

export function traceToTriads(text: string, keywords: KeywordTable = DEFAULT_KEYWORDS): string[][] {
  const symbols = new Map<string, string>();

  const symbolFor = (className: string): string => {
    const existing = symbols.get(className);
    if (existing !== undefined) return existing;
    if (symbols.size >= ALPHABET.length) throw new SymbolSpaceExhausted(className);
    const letter = ALPHABET[symbols.size];
    symbols.set(className, letter);
    return letter;
  };

  const triads: string[][] = [];
  const lines = text.split('\n');
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    if (line.trim().length === 0) continue;
    const fields = line.split('\t');
    if (fields.length !== 3 || fields.some((f) => f.trim().length === 0)) {
      throw new TraceFormatError(
        `line ${i + 1}: expected 'caller<TAB>callee<TAB>kind', got ${JSON.stringify(line)}`,
        i + 1,
      );
    }
    const [caller, callee, kind] = fields.map((f) => f.trim());
    triads.push([symbolFor(caller), classifyContext(kind, keywords), symbolFor(callee)]);
  }
  return triads;
}
