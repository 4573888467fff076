import { ExportError } from "./container.js";
import { ExportOptions } from "./export.js";
import { Framework } from "./mapping.js";

export interface ParsedArgs {
  positional: string[];
  options: ExportOptions;
  seed?: number;
}

export function parseArgs(argv: string[], usage: string): ParsedArgs {
  const positional: string[] = [];
  const options: ExportOptions = {};
  let seed: number | undefined;

  const takeValue = (flag: string, i: number): string => {
    if (i + 1 >= argv.length) throw new ExportError(`${flag} needs a value\n${usage}`, "usage");
    return argv[i + 1];
  };

  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    switch (arg) {
      case "--stride":
        options.stride = parseIntStrict(takeValue(arg, i), arg);
        i++;
        break;
      case "--code-dim":
        options.codeDim = parseIntStrict(takeValue(arg, i), arg);
        i++;
        break;
      case "--model-name":
        options.modelName = takeValue(arg, i);
        i++;
        break;
      case "--trained-steps":
        options.trainedSteps = parseIntStrict(takeValue(arg, i), arg);
        i++;
        break;
      case "--framework": {
        const v = takeValue(arg, i);
        if (v !== "torch" && v !== "tf") {
          throw new ExportError(`--framework must be torch or tf, got ${v}`, "usage");
        }
        options.framework = v as Framework;
        i++;
        break;
      }
      case "--seed":
        seed = parseIntStrict(takeValue(arg, i), arg);
        i++;
        break;
      case "-h":
      case "--help":
        process.stdout.write(usage + "\n");
        process.exit(0);
        break;
      default:
        if (arg.startsWith("-")) {
          throw new ExportError(`unknown option ${arg}\n${usage}`, "usage");
        }
        positional.push(arg);
    }
  }
  return { positional, options, seed };
}

function parseIntStrict(value: string, flag: string): number {
  const n = Number(value);
  if (!Number.isInteger(n)) throw new ExportError(`${flag} expects an integer, got ${value}`, "usage");
  return n;
}

export function runMain(main: () => void): void {
  try {
    main();
  } catch (e) {
    if (e instanceof ExportError) {
      process.stderr.write(`error: ${e.message}\n`);
      process.exit(2);
    }
    process.stderr.write(`internal error: ${e}\n`);
    process.exit(1);
  }
}
