import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    // The acceptance test boots the real REST server as a subprocess.
    testTimeout: 30000,
    hookTimeout: 30000,
  },
});
