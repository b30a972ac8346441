/**
 * Indentation-aware line scanner for Python classes.
 *
 * Produces one member graph per class: method/constructor/attribute nodes,
 * edges for intra-class calls (receiver is the instance itself) and for
 * attribute reads/writes, deduplicated and undirected. String literal and
 * comment contents are blanked before scanning so quoted text never yields
 * false members. Metaprogramming (decorators, class-level assignments,
 * reads of never-assigned attributes) degrades to warnings, not nodes.
 */

import { ClassExtraction, ExtractionResult, MemberEdge, MemberKind, MemberNode, canonicalEdge, canonicalize } from './graph.js';

export class ParseFailure extends Error {
  constructor(message: string, public readonly file: string) {
    super(message);
    this.name = 'ParseFailure';
  }
}

/** Replace string-literal and comment content with spaces, preserving layout. */
export function stripLiterals(source: string, file: string): string {
  const out = source.split('');
  let i = 0;
  const n = source.length;
  let quote: string | null = null; // "'", '"', "'''" or '"""'
  while (i < n) {
    const ch = source[i];
    if (quote !== null) {
      if (ch === '\\' && quote.length === 1) {
        out[i] = ' ';
        if (i + 1 < n && source[i + 1] !== '\n') out[i + 1] = ' ';
        i += 2;
        continue;
      }
      if (source.startsWith(quote, i)) {
        i += quote.length;
        quote = null;
        continue;
      }
      if (ch !== '\n') out[i] = ' ';
      i += 1;
      continue;
    }
    if (ch === '#') {
      while (i < n && source[i] !== '\n') {
        out[i] = ' ';
        i += 1;
      }
      continue;
    }
    if (ch === "'" || ch === '"') {
      const triple = ch.repeat(3);
      quote = source.startsWith(triple, i) ? triple : ch;
      i += quote.length;
      continue;
    }
    i += 1;
  }
  if (quote !== null) {
    throw new ParseFailure(`unterminated string literal (${quote})`, file);
  }
  return out.join('');
}

function indentOf(line: string): number {
  let width = 0;
  for (const ch of line) {
    if (ch === ' ') width += 1;
    else if (ch === '\t') width += 8;
    else break;
  }
  return width;
}

function isBlank(line: string): boolean {
  return line.trim().length === 0;
}

interface MethodBlock {
  name: string;
  kind: MemberKind;
  body: string;
}

interface ClassBlock {
  name: string;
  headerLine: number;
  methods: MethodBlock[];
  warnings: string[];
}

function methodKind(name: string): MemberKind {
  if (name === '__init__') return 'constructor';
  if (name.startsWith('__') && name.endsWith('__')) return 'public_method';
  if (name.startsWith('_')) return 'private_method';
  return 'public_method';
}

const CLASS_RE = /^class\s+([A-Za-z_]\w*)\s*[(:]/;
const DEF_RE = /^(?:async\s+)?def\s+([A-Za-z_]\w*)\s*\(/;

/**
 * Join a def signature that spans lines; returns the index of the line
 * holding the closing colon (the first depth-0 colon) and any same-line
 * body after it.
 */
function readSignature(lines: string[], start: number, file: string): { end: number; trailing: string } {
  let depth = 0;
  for (let i = start; i < lines.length; i++) {
    const line = lines[i];
    for (let c = 0; c < line.length; c++) {
      const ch = line[c];
      if (ch === '(' || ch === '[' || ch === '{') depth += 1;
      else if (ch === ')' || ch === ']' || ch === '}') {
        depth -= 1;
        if (depth < 0) throw new ParseFailure(`unbalanced parentheses near line ${i + 1}`, file);
      } else if (ch === ':' && depth === 0) {
        return { end: i, trailing: line.slice(c + 1) };
      }
    }
  }
  throw new ParseFailure(`unterminated def signature starting at line ${start + 1}`, file);
}

function scanClasses(stripped: string, file: string): ClassBlock[] {
  const lines = stripped.split('\n');
  const classes: ClassBlock[] = [];
  let i = 0;
  while (i < lines.length) {
    const line = lines[i];
    const match = CLASS_RE.exec(line.trimStart());
    if (!match || isBlank(line)) {
      i += 1;
      continue;
    }
    const classIndent = indentOf(line);
    const block: ClassBlock = { name: match[1], headerLine: i, methods: [], warnings: [] };

    // class body: everything more indented than the header
    let j = i + 1;
    let bodyIndent = -1;
    while (j < lines.length) {
      const bodyLine = lines[j];
      if (isBlank(bodyLine)) {
        j += 1;
        continue;
      }
      const indent = indentOf(bodyLine);
      if (indent <= classIndent) break;
      if (bodyIndent < 0) bodyIndent = indent;

      const text = bodyLine.trimStart();
      if (indent === bodyIndent && DEF_RE.test(text)) {
        const name = DEF_RE.exec(text)![1];
        const { end, trailing } = readSignature(lines, j, file);
        const bodyLines: string[] = [];
        if (trailing.trim()) bodyLines.push(trailing);
        let k = end + 1;
        while (k < lines.length && (isBlank(lines[k]) || indentOf(lines[k]) > bodyIndent)) {
          if (!isBlank(lines[k])) bodyLines.push(lines[k]);
          k += 1;
        }
        block.methods.push({ name, kind: methodKind(name), body: bodyLines.join('\n') });
        j = k;
        continue;
      }
      if (indent === bodyIndent && text.startsWith('@')) {
        block.warnings.push(`${block.name}: decorator ${text.split('(')[0]} not modeled`);
        j += 1;
        continue;
      }
      if (indent === bodyIndent && /^[A-Za-z_]\w*\s*(?::[^=\n]+)?=(?!=)/.test(text)) {
        block.warnings.push(`${block.name}: class-level assignment '${text.split('=')[0].trim()}' is not an instance attribute`);
        j += 1;
        continue;
      }
      j += 1;
    }
    classes.push(block);
    i = j;
  }
  return classes;
}

const ATTR_DEF_RE = /\bself\.([A-Za-z_]\w*)\s*(?::[^=\n]+?)?=(?!=)/g;
const SELF_REF_RE = /\bself\.([A-Za-z_]\w*)/g;

function extractClass(block: ClassBlock, file: string): ClassExtraction {
  const warnings = [...block.warnings];
  const methods = new Map<string, MemberKind>();
  const registered: MethodBlock[] = [];
  for (const m of block.methods) {
    if (methods.has(m.name)) {
      warnings.push(`${block.name}: duplicate method '${m.name}' (keeping first)`);
      continue;
    }
    methods.set(m.name, m.kind);
    registered.push(m);
  }

  const attributes = new Set<string>();
  for (const m of registered) {
    for (const match of m.body.matchAll(ATTR_DEF_RE)) {
      const name = match[1];
      if (methods.has(name)) {
        warnings.push(`${block.name}: '${name}' is both a method and an assigned attribute (keeping method)`);
        continue;
      }
      attributes.add(name);
    }
  }

  const nodes: MemberNode[] = [];
  for (const [name, kind] of methods) nodes.push({ id: name, kind, label: name });
  for (const name of attributes) nodes.push({ id: name, kind: 'attribute', label: name });

  const edges: MemberEdge[] = [];
  for (const m of registered) {
    for (const match of m.body.matchAll(SELF_REF_RE)) {
      const name = match[1];
      if (name === m.name) {
        warnings.push(`${block.name}.${m.name}: self-recursive reference ignored (graphs are simple)`);
        continue;
      }
      if (methods.has(name)) {
        edges.push(canonicalEdge(m.name, name, 'method_call'));
      } else if (attributes.has(name)) {
        edges.push(canonicalEdge(m.name, name, 'attribute_access'));
      } else {
        warnings.push(`${block.name}.${m.name}: self.${name} does not resolve to a known member of ${file}`);
      }
    }
  }

  return {
    graph: canonicalize({ class_name: block.name, nodes, edges }),
    warnings,
  };
}

export function extractSource(source: string, file: string): ExtractionResult {
  const stripped = stripLiterals(source, file);
  const classes = scanClasses(stripped, file);
  const result: ExtractionResult = { graphs: [], warnings: [] };
  if (classes.length === 0) {
    result.warnings.push(`${file}: no class definitions found`);
    return result;
  }
  for (const block of classes) {
    const extraction = extractClass(block, file);
    if (extraction.graph.nodes.length === 0) {
      result.warnings.push(`${block.name}: class has no members, skipped`);
      continue;
    }
    result.graphs.push(extraction);
  }
  return result;
}
