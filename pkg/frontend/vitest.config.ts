import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    testTimeout: 30000,
    hookTimeout: 30000,
    // the e2e suite drives one shared gateway subprocess; keep files serial
    fileParallelism: false,
  },
});
