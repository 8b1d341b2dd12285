// One fixed color per label id so the legend reads the same on every
// recording. Index = label id.
export const PALETTE = [
  "#4e79a7", // Theory/Concept
  "#f28e2b", // Exercise/Problem
  "#76b7b2", // Example/Real Application
  "#59a14f", // Organization
  "#e15759", // Interaction
  "#edc948", // Digression
  "#b07aa1", // Other
  "#9c755f", // Indistinct Chat
  "#bab0ac", // Pause
  "#555555", // Miscellaneous
];

export function labelColor(labelId: number): string {
  return PALETTE[labelId % PALETTE.length];
}
