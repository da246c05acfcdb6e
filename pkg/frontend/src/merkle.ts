/** Client-side accumulator: rebuild from public leaves, derive paths. */

import { concat } from "./encoding";
import { zeroLeaf } from "./crypto";
import { sha256 } from "./sha256";

export function zeroLevels(depth: number): Uint8Array[] {
  const levels = [zeroLeaf()];
  for (let i = 0; i < depth; i++) {
    const z = levels[i]!;
    levels.push(sha256(concat(z, z)));
  }
  return levels;
}

export interface MerklePath {
  leafIndex: number;
  siblings: Uint8Array[];
}

export class MerkleTree {
  readonly depth: number;
  private readonly levels: Uint8Array[][]; // levels[0] = leaves
  private readonly zeros: Uint8Array[];

  constructor(leaves: Uint8Array[], depth: number) {
    if (leaves.length > 2 ** depth) throw new Error("too many leaves for depth");
    this.depth = depth;
    this.zeros = zeroLevels(depth);
    this.levels = [leaves.slice()];
    for (let level = 0; level < depth; level++) {
      const below = this.levels[level]!;
      const above: Uint8Array[] = [];
      for (let i = 0; i < Math.ceil(below.length / 2); i++) {
        const left = below[2 * i] ?? this.zeros[level]!;
        const right = below[2 * i + 1] ?? this.zeros[level]!;
        above.push(sha256(concat(left, right)));
      }
      this.levels.push(above);
    }
  }

  root(): Uint8Array {
    return this.levels[this.depth]![0] ?? this.zeros[this.depth]!;
  }

  path(leafIndex: number): MerklePath {
    if (leafIndex >= this.levels[0]!.length) throw new Error("leaf not present");
    const siblings: Uint8Array[] = [];
    let pos = leafIndex;
    for (let level = 0; level < this.depth; level++) {
      siblings.push(this.levels[level]![pos ^ 1] ?? this.zeros[level]!);
      pos >>= 1;
    }
    return { leafIndex, siblings };
  }
}

export function foldPath(leaf: Uint8Array, path: MerklePath): Uint8Array {
  let node = leaf;
  let index = path.leafIndex;
  for (const sibling of path.siblings) {
    node = index & 1 ? sha256(concat(sibling, node)) : sha256(concat(node, sibling));
    index >>= 1;
  }
  return node;
}
