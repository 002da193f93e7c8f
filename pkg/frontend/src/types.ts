// JSON shapes served by the query service. Field names mirror the
// backend's snake_case contract exactly.

export interface LanguageInfo {
  id: string;
  name: string;
  clade: string[];
  latitude: number | null;
  longitude: number | null;
  form_count: number;
}

export interface FormInfo {
  id: string;
  language_id: string;
  cognateset_id: string;
  form: string;
  gloss: string;
  native: string;
  ipa: string;
  original: string;
  subset_id: string;
  notes: string;
  source_refs: { bibkey: string; pages: string }[];
}

export interface EntryResponse {
  cognateset: { id: string; headword: string; description: string; notes: string };
  form_count: number;
  languages: { language: LanguageInfo; forms: FormInfo[] }[];
}

export interface SearchHit {
  id: string;
  form: string;
  gloss: string;
  language_id: string;
  language_name: string;
  cognateset_id: string;
  headword: string;
}

export interface Page<T> {
  items: T[];
  total: number;
  limit: number;
  offset: number;
}

export interface GeoFeature {
  id: string;
  name: string;
  family: string;
  form_count: number;
  latitude: number;
  longitude: number;
}

export interface GeoResponse {
  features: GeoFeature[];
  omitted: number;
}

export interface ApiError {
  error: string;
  message: string;
}
