#ifndef MILL_MILL_H
#define MILL_MILL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32) && defined(MILL_BUILDING)
#define MILL_API __declspec(dllexport)
#elif defined(_WIN32)
#define MILL_API __declspec(dllimport)
#else
#define MILL_API __attribute__((visibility("default")))
#endif

typedef enum mill_status {
  MILL_OK = 0,
  MILL_ERR_LEXING = 1,
  MILL_ERR_STRUCTURE = 2,
  MILL_ERR_INVALID_ARGUMENT = 3,
  MILL_ERR_SCHEMA = 4,
  MILL_ERR_PIPELINE = 5,
  MILL_ERR_EXTRACTION = 6,
  MILL_ERR_SKIPPED = 7,
  MILL_ERR_AMBIGUOUS = 8,
  MILL_ERR_UNSUPPORTED = 9,
  MILL_ERR_CHECK = 10,
  MILL_ERR_IO = 11,
  MILL_ERR_UNDERIVABLE = 12,
  MILL_ERR_INTERNAL = 99
} mill_status;

typedef enum mill_notation { MILL_INFIX = 0, MILL_POLISH = 1 } mill_notation;

/* Short name of a status, e.g. "ambiguous". */
MILL_API const char* mill_status_name(mill_status status);
/* Message of the last failed call on this thread; empty when none. */
MILL_API const char* mill_last_error(void);
/* Releases strings returned through out parameters. */
MILL_API void mill_free(char* text);

/* Types */
typedef struct mill_type mill_type;

MILL_API mill_status mill_type_parse(const char* text, mill_notation notation, mill_type** out);
MILL_API mill_status mill_type_print(const mill_type* type, mill_notation notation, char** out);
MILL_API int mill_type_order(const mill_type* type);
MILL_API int mill_type_equal(const mill_type* a, const mill_type* b);
MILL_API void mill_type_free(mill_type* type);

/* Extraction. `tables_json` and `pass_list` may be NULL for the defaults. The pass list holds one
   pass name per line. */
typedef struct mill_extractor mill_extractor;

MILL_API mill_status mill_extractor_new(const char* tables_json, const char* pass_list, mill_extractor** out);
MILL_API void mill_extractor_free(mill_extractor* extractor);
/* One JSON record per line in `records`, one JSON diagnostic per line in `diagnostics`.
   Returns MILL_OK when at least one record was not skipped. */
MILL_API mill_status mill_extract_xml(const mill_extractor* extractor, const char* xml, const char* sample_id,
                                      char** records, char** diagnostics);

/* Corpus of extracted records, for lexicon statistics and merge learning. */
typedef struct mill_corpus mill_corpus;

MILL_API mill_status mill_corpus_new(const char* tables_json, mill_corpus** out);
MILL_API void mill_corpus_free(mill_corpus* corpus);
/* Skipped records are accepted and ignored. */
MILL_API mill_status mill_corpus_add_record(mill_corpus* corpus, const char* json_line);
/* Number of non-skipped records. */
MILL_API size_t mill_corpus_size(const mill_corpus* corpus);
/* Lexicon TSV and statistics JSON, aggregated over `threads` workers. */
MILL_API mill_status mill_corpus_stats(const mill_corpus* corpus, unsigned threads, char** lexicon_tsv,
                                       char** stats_json);
/* Learns `merges` digram merges over the records' symbol sequences; a negative count merges to
   exhaustion. */
MILL_API mill_status mill_corpus_learn_merges(const mill_corpus* corpus, long merges, char** table);

/* Merge tables. Applying replaces a record's "types" field by a merged "symbols" field in place;
   reverting restores it. */
typedef struct mill_merge_table mill_merge_table;

MILL_API mill_status mill_merge_table_read(const char* text, const char* tables_json, mill_merge_table** out);
MILL_API size_t mill_merge_table_size(const mill_merge_table* table);
MILL_API void mill_merge_table_free(mill_merge_table* table);
MILL_API mill_status mill_merges_apply(const mill_merge_table* table, const char* json_line, char** out);
MILL_API mill_status mill_merges_revert(const mill_merge_table* table, const char* json_line, char** out);

/* Proofs. Checks every proof in `text`; `report` holds one JSON object per proof. */
MILL_API mill_status mill_check_proofs(const char* text, char** report, size_t* checked, size_t* valid);

/* Parser. A parser owns a derivability cache and must not be shared across threads. Among equally
   small argument sides the search prefers the rightmost one, or the leftmost when `prefer_left` is
   nonzero. */
typedef struct mill_parser mill_parser;

MILL_API mill_status mill_parser_new(const char* tables_json, int prefer_left, mill_parser** out);
MILL_API void mill_parser_free(mill_parser* parser);
/* Input: {"id"?, "words", "types" (polish), "goal"? (polish), "skipped"?}. Output on success:
   {"id", "goal", "term", "proof"}. `fallback_id` names records without an id. */
MILL_API mill_status mill_parse_record(mill_parser* parser, const char* json_line, const char* fallback_id,
                                       char** result);

#ifdef __cplusplus
}
#endif

#endif
